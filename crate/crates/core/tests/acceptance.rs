//! Acceptance run: one line per criterion with its wall-clock budget.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::Rng;

use rigidpack::connectivity::{brute_force_connectivity, is_k_connected, separates};
use rigidpack::constructions::{complete_graph, gnp, lovasz_yemini};
use rigidpack::graph::{induced_edge_count, ArcSet, Graph};
use rigidpack::matroid::{pack_rigid, pack_tree_rigid, partition, GraphicOracle, IndependenceOracle};
use rigidpack::orientation::{
    hakimi_orientation, k_connected_orientation, set_in_neighbors, CertificateKind, DegreeSpec, RSet,
};
use rigidpack::rigidity::{exact_oracle_d1, exact_oracle_d2, RigidityOracle};
use rigidpack::stochastic::{
    build_e0, estimate_e0_mean, is_union_independent, min_order_expectation, OrderExpectation,
    OrderMode,
};
use rigidpack::SeededStream;

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const SEED: u64 = 20_240_601;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rank_formulas() -> Outcome {
    let mut checked = 0;
    for d in 1..=4 {
        for n in 1..=12 {
            let kn = complete_graph(n);
            let o = RigidityOracle::new(&kn, d, SEED, n as u64).map_err(|e| e.to_string())?;
            let expected = if n <= d + 1 {
                n * (n - 1) / 2
            } else {
                d * n - (d + 1) * d / 2
            };
            let got = o.rank_d(&kn.all_edge_ids());
            ensure(got == expected, || format!("d={d} n={n}: rank {got}, expected {expected}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (d, n) cases"))
}

fn oracle_cross_validation() -> Outcome {
    let mut queries = 0;
    for i in 0..1000u64 {
        let mut rng = SeededStream::new(SEED, 1_000_000 + i);
        let n = rng.random_range(2..=10);
        let g = gnp(n, 0.5, SEED, i);
        let mut sets = vec![g.all_edge_ids()];
        for _ in 0..8 {
            sets.push(g.all_edge_ids().into_iter().filter(|_| rng.random_bool(0.5)).collect());
        }
        for d in 1..=2 {
            let o = RigidityOracle::new(&g, d, SEED, i).map_err(|e| e.to_string())?;
            for s in &sets {
                let exact = if d == 1 {
                    exact_oracle_d1(&g, s)
                } else {
                    exact_oracle_d2(&g, s)
                };
                queries += 1;
                ensure(o.is_independent(s) == exact, || {
                    format!("graph {i} d={d} set {s:?}: randomized disagrees with exact")
                })?;
            }
        }
    }
    Ok(format!("{queries} queries, 0 mismatches"))
}

fn union_ranks() -> Outcome {
    let mut lines = Vec::new();
    for (d, t, n) in [(2, 2, 8), (2, 3, 12), (3, 2, 14)] {
        let kn = complete_graph(n);
        let oracles: Vec<RigidityOracle> = (0..t)
            .map(|i| RigidityOracle::new(&kn, d, SEED, i as u64).unwrap())
            .collect();
        let refs: Vec<&dyn IndependenceOracle> =
            oracles.iter().map(|o| o as &dyn IndependenceOracle).collect();
        let got = partition(&refs, &kn.all_edge_ids()).map_err(|e| e.to_string())?.total;
        let expected = t * d * n - t * (d + 1) * d / 2;
        ensure(got == expected, || format!("R_{d}^{t}(K_{n}) = {got}, expected {expected}"))?;
        lines.push(format!("R_{d}^{t}(K_{n})={got}"));
    }
    for (d, n) in [(2, 8), (3, 15), (6, 11)] {
        let kn = complete_graph(n);
        let graphic = GraphicOracle::new(&kn);
        let rigid = RigidityOracle::new(&kn, d, SEED, 7).unwrap();
        let got = partition(&[&graphic, &rigid], &kn.all_edge_ids())
            .map_err(|e| e.to_string())?
            .total;
        let expected = (d + 1) * n - (d + 1) * d / 2 - 1;
        ensure(got == expected, || format!("M_{d}(K_{n}) = {got}, expected {expected}"))?;
        lines.push(format!("M_{d}(K_{n})={got}"));
    }
    Ok(lines.join(" "))
}

fn rigid_part_ok(g: &Graph, part: &[usize], d: usize, stream: u64) -> bool {
    let sub = g.edge_subgraph(part).unwrap();
    RigidityOracle::new(&sub, d, SEED ^ 0xfeed, stream)
        .unwrap()
        .is_d_rigid()
}

fn disjoint(parts: &[&[usize]], m: usize) -> bool {
    let mut used = vec![false; m];
    parts.iter().flat_map(|p| p.iter()).all(|&e| !std::mem::replace(&mut used[e], true))
}

fn packings() -> Outcome {
    let mut lines = Vec::new();
    for (n, d) in [(17, 4), (33, 8)] {
        let kn = complete_graph(n);
        let p = pack_rigid(&kn, d, 2, SEED).map_err(|e| format!("K_{n} d={d}: {e}"))?;
        let parts: Vec<&[usize]> = p.parts.iter().map(Vec::as_slice).collect();
        ensure(disjoint(&parts, kn.m()), || format!("K_{n}: parts overlap"))?;
        for (i, part) in p.parts.iter().enumerate() {
            ensure(rigid_part_ok(&kn, part, d, i as u64), || format!("K_{n}: part {i} not {d}-rigid"))?;
        }
        ensure(p.verified, || format!("K_{n}: internal verification failed"))?;
        lines.push(format!("K_{n} d={d} sizes {:?}", p.report.sizes));
    }
    let k15 = complete_graph(15);
    let p = pack_tree_rigid(&k15, 3, SEED).map_err(|e| format!("K_15 tree+rigid: {e}"))?;
    ensure(disjoint(&[&p.tree, &p.rigid], k15.m()), || "tree and rigid part overlap".into())?;
    ensure(p.tree.len() == 14 && GraphicOracle::new(&k15).is_independent(&p.tree), || {
        "tree part is not a spanning tree".into()
    })?;
    ensure(rigid_part_ok(&k15, &p.rigid, 3, 99), || "rigid partner not 3-rigid".into())?;
    lines.push(format!("K_15 tree {} + rigid {}", p.tree.len(), p.rigid.len()));
    Ok(lines.join("; "))
}

fn orientation_pipeline() -> Outcome {
    let mut lines = Vec::new();
    for (n, k) in [(17, 2), (33, 3)] {
        let kn = complete_graph(n);
        let out = k_connected_orientation(&kn, k, None, SEED, true)
            .map_err(|e| format!("K_{n} k={k}: {e}"))?;
        let d = 4 * k - 4;
        let spec = RSet::first(n, d).spec(n).unwrap();
        ensure(out.bases[0].in_degrees() == spec.values(), || {
            format!("K_{n}: first base in-degrees differ from the specification")
        })?;
        ensure(out.bases[1].out_degrees() == spec.values(), || {
            format!("K_{n}: second base out-degrees differ from the specification")
        })?;
        let verdict = is_k_connected(&out.digraph, k);
        ensure(verdict.connected, || format!("K_{n}: not {k}-connected: {:?}", verdict.certificate))?;
        lines.push(format!("K_{n} k={k} d={d} bases {:?}", out.report.base_sizes));
    }
    Ok(lines.join("; "))
}

fn in_neighbor_sweep() -> Outcome {
    let n = 17;
    let kn = complete_graph(n);
    let out = k_connected_orientation(&kn, 2, None, SEED, false).map_err(|e| e.to_string())?;
    let r = RSet::first(n, 4);
    let base = &out.bases[0];
    let mut rng = SeededStream::new(SEED, 6);
    let mut sampled = 0;
    let mut min_seen = usize::MAX;
    while sampled < 500 {
        let size = rng.random_range(1..n);
        let x: Vec<usize> = sample(&mut rng, n, size).into_vec();
        if r.count_in(&x) > 5 {
            continue;
        }
        let w = set_in_neighbors(base, &x);
        min_seen = min_seen.min(w.len());
        ensure(w.len() >= 2, || format!("X = {x:?} has in-neighbors {w:?}"))?;
        sampled += 1;
    }
    Ok(format!("500 sets, fewest in-neighbors {min_seen}"))
}

/// Exhaustive search for an orientation with in-degrees `g`.
fn brute_orientable(g: &Graph, spec: &[usize]) -> bool {
    fn go(g: &Graph, e: usize, left: &mut [usize]) -> bool {
        if e == g.m() {
            return left.iter().all(|&x| x == 0);
        }
        let (u, v) = g.edge(e);
        for h in [u, v] {
            if left[h] > 0 {
                left[h] -= 1;
                let ok = go(g, e + 1, left);
                left[h] += 1;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    spec.iter().sum::<usize>() == g.m() && go(g, 0, &mut spec.to_vec())
}

fn hakimi_condition(g: &Graph, spec: &[usize]) -> bool {
    let n = g.n();
    spec.iter().sum::<usize>() == g.m()
        && (1u32..1 << n).all(|mask| {
            let x: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            induced_edge_count(g, &x).unwrap() <= x.iter().map(|&v| spec[v]).sum()
        })
}

fn hakimi_certificates() -> Outcome {
    let (mut feasible, mut violating, mut mismatch) = (0, 0, 0);
    for i in 0..200u64 {
        let mut rng = SeededStream::new(SEED, 7_000_000 + i);
        let n = rng.random_range(2..=8);
        let g = gnp(n, rng.random_range(0.2..0.9), SEED, 7_000_000 + i);
        let mut spec = vec![0; n];
        if rng.random_bool(0.85) {
            for _ in 0..g.m() {
                spec[rng.random_range(0..n)] += 1;
            }
        } else {
            for s in spec.iter_mut() {
                *s = rng.random_range(0..n);
            }
        }
        let brute = brute_orientable(&g, &spec);
        ensure(brute == hakimi_condition(&g, &spec), || format!("case {i}: brute force and subset check disagree"))?;
        let ds = DegreeSpec::new(spec.clone());
        match hakimi_orientation(&g, &ds) {
            Ok(dg) => {
                ensure(brute, || format!("case {i}: oriented an infeasible spec"))?;
                ensure(dg.in_degrees() == spec, || format!("case {i}: wrong in-degrees"))?;
                feasible += 1;
            }
            Err(cert) => {
                ensure(!brute, || format!("case {i}: rejected a feasible spec"))?;
                ensure(cert.holds(&g, &ds), || format!("case {i}: certificate {cert:?} does not hold"))?;
                match cert.kind {
                    CertificateKind::ViolatingSet => violating += 1,
                    _ => mismatch += 1,
                }
            }
        }
    }
    Ok(format!("{feasible} feasible, {violating} violating sets, {mismatch} count mismatches"))
}

fn tight_examples() -> Outcome {
    let ex = lovasz_yemini(&[2], 4).map_err(|e| e.to_string())?;
    ensure(ex.graph.n() == 40, || "wrong vertex count".into())?;
    ensure(is_k_connected(&ex.graph, 5).connected, || "[2], s=4 is not 5-connected".into())?;
    let o = RigidityOracle::new(&ex.graph, 2, SEED, 0).unwrap();
    let r2 = o.rank_d(&ex.graph.all_edge_ids());
    ensure(r2 < 2 * 40 - 3, || format!("rank {r2} is not deficient"))?;
    ensure(ex.bound.strict, || "bound not strict at s=4".into())?;

    let ex = lovasz_yemini(&[1, 1], 3).map_err(|e| e.to_string())?;
    let n = ex.graph.n();
    ensure(is_k_connected(&ex.graph, 3).connected, || "[1,1], s=3 is not 3-connected".into())?;
    let forest = GraphicOracle::new(&ex.graph);
    let r = partition(&[&forest, &forest], &ex.graph.all_edge_ids())
        .map_err(|e| e.to_string())?
        .total;
    ensure(r < 2 * (n - 1), || format!("two forests cover {r} edges"))?;
    Ok(format!("[2] s=4: r_2={r2} < 77; [1,1] s=3: n={n}, r_1^2={r} < {}", 2 * (n - 1)))
}

fn stochastic_suite() -> Outcome {
    for size in 1..=8 {
        for d in 1..=size {
            let exact = min_order_expectation(size, d, OrderMode::Exact).unwrap();
            let brute = min_order_expectation(size, d, OrderMode::Brute).unwrap();
            ensure(exact == brute, || format!("|S|={size} d={d}: exact {exact:?} != brute {brute:?}"))?;
        }
    }
    let mc = match min_order_expectation(10, 3, OrderMode::MonteCarlo { trials: 100_000, seed: SEED }) {
        Ok(OrderExpectation::Sampled(e)) => e,
        other => return Err(format!("unexpected {other:?}")),
    };
    ensure(mc.verdict, || format!("Monte Carlo {mc:?} outside 3 standard errors"))?;

    let k241 = complete_graph(241);
    let est = estimate_e0_mean(&k241, 3, 2, 200, SEED);
    ensure(est.hypothesis_met, || "K_241 should meet the degree hypothesis".into())?;
    ensure(est.estimate.verdict, || format!("E_0 estimate {:?} below bound", est.estimate))?;

    for run in 0..50u64 {
        let g = gnp(60, 0.5, SEED, 9_000 + run);
        let c = build_e0(&g, 2, 2, SEED, run);
        let ok = is_union_independent(&g, &c.e0, 2, 2, SEED + run).map_err(|e| e.to_string())?;
        ensure(ok, || format!("run {run}: E_0 of size {} is dependent", c.e0.len()))?;
    }
    Ok(format!(
        "MC {:.4}±{:.4} vs {:.1}; E_0 mean {:.2}±{:.2} vs {:.2}; 50 independent",
        mc.estimate, mc.stderr, mc.bound, est.estimate.estimate, est.estimate.stderr, est.estimate.bound
    ))
}

fn random_arcs(n: usize, p: f64, rng: &mut SeededStream) -> ArcSet {
    let arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v)
        .filter(|_| rng.random_bool(p))
        .collect();
    ArcSet::new(n, arcs).unwrap()
}

fn connectivity_vs_brute() -> Outcome {
    let (mut yes, mut no) = (0, 0);
    for i in 0..500u64 {
        let mut rng = SeededStream::new(SEED, 10_000_000 + i);
        let n = rng.random_range(2..=10);
        let k = rng.random_range(1..=4);
        let p = rng.random_range(0.3..0.95);
        let arcs = if i % 2 == 0 {
            ArcSet::symmetric(&gnp(n, p, SEED, 10_000_000 + i))
        } else {
            random_arcs(n, p, &mut rng)
        };
        let fast = is_k_connected(&arcs, k);
        let brute = brute_force_connectivity(&arcs, k).map_err(|e| e.to_string())?;
        ensure(fast.connected == brute, || format!("case {i} (n={n}, k={k}): flow {} vs brute {brute}", fast.connected))?;
        if let Some(c) = &fast.certificate {
            ensure(c.separator.len() < k && separates(&arcs, &c.separator, c.pair.0, c.pair.1), || {
                format!("case {i}: invalid certificate {c:?}")
            })?;
        } else if !fast.connected {
            ensure(n < k + 1, || format!("case {i}: failure without certificate"))?;
        }
        if brute {
            yes += 1;
        } else {
            no += 1;
        }
    }
    Ok(format!("500 agreements ({yes} connected, {no} not)"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "rank formulas", budget: Duration::from_secs(1), run: rank_formulas },
        Criterion { id: 2, name: "oracle cross-validation", budget: Duration::from_secs(30), run: oracle_cross_validation },
        Criterion { id: 3, name: "union-rank formulas", budget: Duration::from_secs(60), run: union_ranks },
        Criterion { id: 4, name: "rigid packings", budget: Duration::from_secs(120), run: packings },
        Criterion { id: 5, name: "orientation pipeline", budget: Duration::from_secs(180), run: orientation_pipeline },
        Criterion { id: 6, name: "in-neighbor sweep", budget: Duration::from_secs(30), run: in_neighbor_sweep },
        Criterion { id: 7, name: "Hakimi certificates", budget: Duration::from_secs(30), run: hakimi_certificates },
        Criterion { id: 8, name: "tight examples", budget: Duration::from_secs(120), run: tight_examples },
        Criterion { id: 9, name: "stochastic suite", budget: Duration::from_secs(600), run: stochastic_suite },
        Criterion { id: 10, name: "connectivity vs brute force", budget: Duration::from_secs(60), run: connectivity_vs_brute },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= c.budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("over budget: {detail}")),
            Err(msg) => ("FAIL", msg),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "[{status}] criterion {:>2} {:<28} {:>8.2}s / {:>4}s  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
