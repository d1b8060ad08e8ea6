//! Random constructions and seeded Monte Carlo estimates of their
//! expectations.
//!
//! Every trial owns the stream `(seed, trial)`. Per-trial values are
//! collected in trial order and summed pairwise, so means do not depend on
//! the thread schedule.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{back_neighbors, Digraph, EdgeId, Graph, VertexOrdering};
use crate::matroid::{partition, GraphicOracle, IndependenceOracle, PartitionError};
use crate::orientation::balanced_orientation;
use crate::rigidity::{RigidityError, RigidityOracle};
use crate::stream::SeededStream;

/// Largest set size accepted by the exhaustive mode.
pub const BRUTE_MAX_SET: usize = 8;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("set size {size} is smaller than d = {d}")]
    SetTooSmall { size: usize, d: usize },
    #[error("exhaustive mode is limited to sets of size <= {BRUTE_MAX_SET}, got {0}")]
    TooLarge(usize),
    #[error("parameter {name} must be at least {min}")]
    TooSmall { name: &'static str, min: usize },
    #[error("invalid probability or deviation: {0}")]
    Distribution(String),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Mean of `values` by recursive halving.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn run_trials<F>(trials: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut SeededStream) -> f64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(&mut SeededStream::new(seed, i as u64)))
        .collect()
}

/// Statistical estimate against a stated bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub verdict: bool,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderMode {
    Exact,
    Brute,
    MonteCarlo { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OrderExpectation {
    Rational(Ratio<u64>),
    Sampled(Estimate),
}

fn order_closed_form(size: usize, d: usize) -> Ratio<u64> {
    let (s, d) = (size as u64, d as u64);
    Ratio::from_integer(d) - Ratio::new(d * (d + 1), 2 * s)
}

fn order_brute(size: usize, d: usize) -> Ratio<u64> {
    // the fixed element is 0; count predecessors over all permutations
    let mut perm: Vec<usize> = (0..size).collect();
    let (mut total, mut count) = (0u64, 0u64);
    loop {
        let f = perm.iter().position(|&x| x == 0).unwrap();
        total += f.min(d) as u64;
        count += 1;
        // next lexicographic permutation
        let Some(i) = (1..size).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..size).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    Ratio::new(total, count)
}

/// `E(min(d, f(pi)))` where `f(pi)` counts the elements preceding a fixed
/// element in a uniformly random ordering of a set of the given size.
pub fn min_order_expectation(
    size: usize,
    d: usize,
    mode: OrderMode,
) -> Result<OrderExpectation, LabError> {
    if d == 0 {
        return Err(LabError::TooSmall { name: "d", min: 1 });
    }
    if size < d {
        return Err(LabError::SetTooSmall { size, d });
    }
    match mode {
        OrderMode::Exact => Ok(OrderExpectation::Rational(order_closed_form(size, d))),
        OrderMode::Brute => {
            if size > BRUTE_MAX_SET {
                return Err(LabError::TooLarge(size));
            }
            Ok(OrderExpectation::Rational(order_brute(size, d)))
        }
        OrderMode::MonteCarlo { trials, seed } => {
            let values = run_trials(trials, seed, |rng| {
                let mut perm: Vec<usize> = (0..size).collect();
                perm.shuffle(rng);
                perm.iter().position(|&x| x == 0).unwrap().min(d) as f64
            });
            let (estimate, stderr) = mean_and_stderr(&values);
            let exact = order_closed_form(size, d);
            let bound = *exact.numer() as f64 / *exact.denom() as f64;
            Ok(OrderExpectation::Sampled(Estimate {
                estimate,
                stderr,
                bound,
                verdict: (estimate - bound).abs() <= 3.0 * stderr.max(f64::EPSILON),
                trials,
                seed,
            }))
        }
    }
}

pub fn random_ordering(n: usize, seed: u64, stream: u64) -> VertexOrdering {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut SeededStream::new(seed, stream));
    VertexOrdering::new(perm).expect("shuffle is a permutation")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum E0Phase {
    Forward,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E0Step {
    pub phase: E0Phase,
    /// Round `j` for forward steps, 0 for the outside step.
    pub round: usize,
    pub edges: usize,
}

/// The random independent subgraph built from a balanced orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E0Construction {
    pub u: Vec<usize>,
    /// `F_1, ..., F_t`.
    pub f: Vec<Vec<EdgeId>>,
    /// Edges joining vertices outside `U` into `U`.
    pub d_edges: Vec<EdgeId>,
    pub e0: Vec<EdgeId>,
    pub audit: Vec<E0Step>,
}

/// Runs the construction on a fixed orientation and vertex set `U`.
///
/// In round `j`, each `v` in `U` keeps the at most `d` out-neighbors in `U`
/// that precede it in `pi_j` (earliest first) along edges not taken in an
/// earlier round. Each `v` outside `U` then keeps its `t d` smallest
/// out-neighbors in `U`.
pub fn build_e0_with_u<R: Rng + ?Sized>(
    dg: &Digraph,
    in_u: &[bool],
    d: usize,
    t: usize,
    rng: &mut R,
) -> E0Construction {
    let n = dg.n();
    let mut out: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
    for e in 0..dg.m() {
        let (a, b) = dg.arc(e);
        out[a].push((b, e));
    }
    for list in &mut out {
        list.sort_unstable();
    }
    let u: Vec<usize> = (0..n).filter(|&v| in_u[v]).collect();
    let mut used = vec![false; dg.m()];
    let mut f = Vec::with_capacity(t);
    let mut audit = Vec::new();
    let mut pos = vec![usize::MAX; n];
    for j in 1..=t {
        let mut order = u.clone();
        order.shuffle(rng);
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut fj = Vec::new();
        for &v in &u {
            let mut a: Vec<(usize, EdgeId)> = out[v]
                .iter()
                .filter(|&&(w, e)| in_u[w] && !used[e] && pos[w] < pos[v])
                .map(|&(w, e)| (pos[w], e))
                .collect();
            a.sort_unstable();
            fj.extend(a.iter().take(d).map(|&(_, e)| e));
        }
        for &e in &fj {
            used[e] = true;
        }
        fj.sort_unstable();
        audit.push(E0Step {
            phase: E0Phase::Forward,
            round: j,
            edges: fj.len(),
        });
        f.push(fj);
    }
    let mut d_edges: Vec<EdgeId> = (0..n)
        .filter(|&v| !in_u[v])
        .flat_map(|v| {
            out[v]
                .iter()
                .filter(|&&(w, _)| in_u[w])
                .take(t * d)
                .map(|&(_, e)| e)
                .collect::<Vec<_>>()
        })
        .collect();
    d_edges.sort_unstable();
    audit.push(E0Step {
        phase: E0Phase::Outside,
        round: 0,
        edges: d_edges.len(),
    });
    let mut e0: Vec<EdgeId> = f.iter().flatten().chain(&d_edges).copied().collect();
    e0.sort_unstable();
    E0Construction {
        u,
        f,
        d_edges,
        e0,
        audit,
    }
}

fn build_e0_oriented(dg: &Digraph, d: usize, t: usize, rng: &mut SeededStream) -> E0Construction {
    let in_u: Vec<bool> = (0..dg.n()).map(|_| rng.random_bool(0.5)).collect();
    build_e0_with_u(dg, &in_u, d, t, rng)
}

/// Balanced orientation, random `U` with probability 1/2 per vertex, then
/// [`build_e0_with_u`].
pub fn build_e0(g: &Graph, d: usize, t: usize, seed: u64, stream: u64) -> E0Construction {
    let dg = balanced_orientation(g);
    build_e0_oriented(&dg, d, t, &mut SeededStream::new(seed, stream))
}

/// Whether `set` is independent in the `t`-fold union of `R_d`.
pub fn is_union_independent(
    g: &Graph,
    set: &[EdgeId],
    d: usize,
    t: usize,
    seed: u64,
) -> Result<bool, LabError> {
    let oracles = (0..t)
        .map(|i| RigidityOracle::new(g, d, seed, i as u64))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&dyn IndependenceOracle> =
        oracles.iter().map(|o| o as &dyn IndependenceOracle).collect();
    Ok(partition(&refs, set)?.total == set.len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct E0Estimate {
    #[serde(flatten)]
    pub estimate: Estimate,
    /// Whether the minimum degree reaches `t * 10 d (d + 1)`.
    pub hypothesis_met: bool,
}

/// Mean of `|E_0|` over seeded trials against `(t d - 1/4) n`.
pub fn estimate_e0_mean(g: &Graph, d: usize, t: usize, trials: usize, seed: u64) -> E0Estimate {
    let dg = balanced_orientation(g);
    let values = run_trials(trials, seed, |rng| build_e0_oriented(&dg, d, t, rng).e0.len() as f64);
    let (estimate, stderr) = mean_and_stderr(&values);
    let bound = (t * d) as f64 - 0.25;
    let bound = bound * g.n() as f64;
    E0Estimate {
        estimate: Estimate {
            estimate,
            stderr,
            bound,
            verdict: estimate - 3.0 * stderr >= bound,
            trials,
            seed,
        },
        hypothesis_met: g.n() > 0 && g.min_degree() >= t * 10 * d * (d + 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    A,
    B,
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GpiD {
    pub pi: Vec<usize>,
    #[serde(rename = "D")]
    pub big_d: usize,
    pub edges: Vec<EdgeId>,
    /// Rule applied at each vertex, indexed by vertex id.
    pub rules: Vec<Rule>,
    /// Edges added at each vertex, indexed by vertex id.
    pub added: Vec<usize>,
}

/// Scans `pi` and joins each vertex to some of its back-neighbors: all of
/// them when there are at most `D`; otherwise the `D` smallest when they
/// form a clique, else the first nonadjacent pair `x < y` plus the `D - 1`
/// smallest others.
pub fn build_gpid(g: &Graph, pi: &VertexOrdering, big_d: usize) -> Result<GpiD, LabError> {
    if big_d < 2 {
        return Err(LabError::TooSmall { name: "D", min: 2 });
    }
    let n = g.n();
    let mut rules = vec![Rule::A; n];
    let mut added = vec![0; n];
    let mut edges = Vec::new();
    for &v in pi.as_slice() {
        let mut back = back_neighbors(g, pi, v).expect("ordering covers the graph");
        back.sort_unstable();
        let chosen: Vec<usize> = if back.len() <= big_d {
            back
        } else {
            let pair = back.iter().enumerate().find_map(|(i, &x)| {
                back[i + 1..].iter().find(|&&y| !g.has_edge(x, y)).map(|&y| (x, y))
            });
            match pair {
                None => {
                    rules[v] = Rule::B;
                    back.truncate(big_d);
                    back
                }
                Some((x, y)) => {
                    rules[v] = Rule::C;
                    let mut c = vec![x, y];
                    c.extend(back.iter().filter(|&&w| w != x && w != y).take(big_d - 1));
                    c
                }
            }
        };
        added[v] = chosen.len();
        edges.extend(chosen.iter().map(|&w| g.edge_id(v, w).expect("back neighbor")));
    }
    edges.sort_unstable();
    Ok(GpiD {
        pi: pi.as_slice().to_vec(),
        big_d,
        edges,
        rules,
        added,
    })
}

/// Mean of `|E^D_pi|` over uniformly random orderings against `D |V|`.
/// The hypotheses under which the bound is known to hold are not checked.
pub fn estimate_gpid_mean(g: &Graph, big_d: usize, trials: usize, seed: u64) -> Result<Estimate, LabError> {
    if big_d < 2 {
        return Err(LabError::TooSmall { name: "D", min: 2 });
    }
    let n = g.n();
    let values = run_trials(trials, seed, |rng| {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let pi = VertexOrdering::new(perm).expect("shuffle is a permutation");
        build_gpid(g, &pi, big_d).expect("D checked").edges.len() as f64
    });
    let (estimate, stderr) = mean_and_stderr(&values);
    let bound = (big_d * n) as f64;
    Ok(Estimate {
        estimate,
        stderr,
        bound,
        verdict: estimate - 3.0 * stderr >= bound,
        trials,
        seed,
    })
}

/// Whether `G_pi^{d+1}` is independent in the union of the graphic matroid
/// and `R_d`.
pub fn check_gpid_independent(
    g: &Graph,
    pi: &VertexOrdering,
    d: usize,
    seed: u64,
) -> Result<bool, LabError> {
    let gp = build_gpid(g, pi, d + 1)?;
    let graphic = GraphicOracle::new(g);
    let rigid = RigidityOracle::new(g, d, seed, 0)?;
    Ok(partition(&[&graphic, &rigid], &gp.edges)?.total == gp.edges.len())
}

/// Empirical lower tail `P(X <= (1 - eta) n p)` of a binomial against the
/// bound `exp(-eta^2 n p / 2)`; the verdict allows three standard errors.
pub fn chernoff_check(n: u64, p: f64, eta: f64, trials: usize, seed: u64) -> Result<Estimate, LabError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(LabError::Distribution(format!("eta = {eta}")));
    }
    let dist = Binomial::new(n, p).map_err(|e| LabError::Distribution(e.to_string()))?;
    let threshold = (1.0 - eta) * n as f64 * p;
    let values = run_trials(trials, seed, |rng| {
        f64::from(u8::from(dist.sample(rng) as f64 <= threshold))
    });
    let (estimate, stderr) = mean_and_stderr(&values);
    let bound = (-eta * eta * n as f64 * p / 2.0).exp();
    Ok(Estimate {
        estimate,
        stderr,
        bound,
        verdict: estimate - 3.0 * stderr <= bound,
        trials,
        seed,
    })
}
