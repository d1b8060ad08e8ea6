use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use rigidpack::connectivity::is_k_connected;
use rigidpack::constructions::{
    complete_graph, gnp, harary_host, lovasz_yemini, tdrigid_packing, tree_rigid_decomposition,
};
use rigidpack::graph::{read_arcs, read_graph, write_digraph, write_graph, Graph, GraphError};
use rigidpack::matroid::{pack_rigid, pack_tree_rigid, PackError};
use rigidpack::orientation::{k_connected_orientation, OrientationError, RSet};
use rigidpack::rigidity::RigidityOracle;
use rigidpack::stochastic::{
    chernoff_check, estimate_e0_mean, estimate_gpid_mean, min_order_expectation, OrderExpectation,
    OrderMode,
};

const THREADS_ENV: &str = "RIGIDPACK_THREADS";

#[derive(Parser)]
#[command(name = "rigidpack", version, about = "Rigid packings and k-connected orientations")]
struct Cli {
    /// Worker threads (default: RIGIDPACK_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Io {
    /// Read from this file instead of standard input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Write to this file instead of standard output.
        #[arg(long, global = true)]
        output: Option<PathBuf>,
        /// Write the witness JSON to this file.
        #[arg(long, global = true)]
        witness: Option<PathBuf>,
    },
    /// Print the rank of the edge set in the d-dimensional rigidity matroid.
    Rank {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: Io,
    },
    /// Pack t edge-disjoint minimally d-rigid spanning subgraphs.
    Pack {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fail with exit code 1 unless every part re-verifies.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Pack a spanning tree and a minimally d-rigid spanning subgraph.
    Kriesell {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Orient the graph, aiming for k-connectivity.
    Orient {
        #[arg(long)]
        k: usize,
        /// Comma-separated vertex ids of R (default: the first ones).
        #[arg(long = "R", value_delimiter = ',')]
        r: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Decide k-connectivity; exit code 1 with a separator when it fails.
    Verify {
        #[arg(long)]
        k: usize,
        /// Read arcs "u v" (u -> v) instead of undirected edges.
        #[arg(long)]
        digraph: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Seeded Monte Carlo experiments.
    Simulate {
        #[command(subcommand)]
        kind: SimKind,
        #[arg(long, global = true, default_value_t = 1000)]
        trials: usize,
        #[arg(long, global = true, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Complete {
        #[arg(long)]
        n: usize,
    },
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Harary {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    LovaszYemini {
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        #[arg(long)]
        s: usize,
    },
    TdrigidPack {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
    },
    TreeRigid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand)]
enum SimKind {
    /// E min(d, f(pi)) for a set of the given size.
    Ordering {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        d: usize,
    },
    /// Mean |E_0| on K_n or on an input graph.
    E0 {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Mean |E^D_pi| on K_n or on an input graph.
    Gpd {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "D")]
        big_d: usize,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Binomial lower tail against the Chernoff bound.
    Chernoff {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        eta: f64,
    },
}

/// Why a run ended without success.
enum Failure {
    /// A verifier or solver rejected the instance; output already written.
    Rejected,
    /// Bad input or flags.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Usage(e.into())
    }
}

type Run = Result<(), Failure>;

fn envelope(object: &str, seed: Option<u64>, stats: impl Serialize, certificates: impl Serialize) -> Value {
    json!({
        "schema": 1,
        "object": object,
        "seed": seed,
        "stats": stats,
        "certificates": certificates,
    })
}

/// Reads a graph file. Trailing JSON report lines, as printed by `orient`,
/// are dropped so that outputs can be piped back in.
fn read_input(path: &Option<PathBuf>) -> anyhow::Result<String> {
    let mut s = match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        }
    };
    while let Some(last) = s.trim_end().lines().last().filter(|l| l.trim_start().starts_with('{')) {
        let cut = s.trim_end().len() - last.len();
        s.truncate(cut);
    }
    Ok(s)
}

fn read_input_graph(path: &Option<PathBuf>) -> anyhow::Result<Graph> {
    Ok(read_graph(&read_input(path)?)?)
}

fn emit(path: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json_line(v: &Value) -> String {
    format!("{v}\n")
}

fn gen(kind: GenKind, output: &Option<PathBuf>, witness: &Option<PathBuf>) -> Run {
    let (graph, wit): (Graph, Option<Value>) = match kind {
        GenKind::Complete { n } => (complete_graph(n), None),
        GenKind::Gnp { n, p, seed } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(anyhow!("p must lie in [0, 1]").into());
            }
            (gnp(n, p, seed, 0), None)
        }
        GenKind::Harary { k, m } => (harary_host(k, m).map_err(|e| anyhow!(e))?, None),
        GenKind::LovaszYemini { d, s } => {
            let ex = lovasz_yemini(&d, s).map_err(|e| anyhow!(e))?;
            let stats = json!({"d_list": ex.d_list, "s": ex.s, "K": ex.k, "n": ex.graph.n(), "m": ex.graph.m()});
            let w = envelope("tight-example", None, stats, &ex.bound);
            (ex.graph, Some(w))
        }
        GenKind::TdrigidPack { n, d, t } => {
            let w = tdrigid_packing(n, d, t).map_err(|e| anyhow!(e))?;
            let parts: Vec<Value> = w
                .parts
                .iter()
                .map(|p| json!({"label": p.label, "claim": p.claim, "edges": p.edges}))
                .collect();
            let stats = json!({"n": n, "d": d, "t": t, "disjoint": w.is_disjoint()});
            (w.host.clone(), Some(envelope("tdrigid-packing", None, stats, parts)))
        }
        GenKind::TreeRigid { n, d } => {
            let w = tree_rigid_decomposition(n, d).map_err(|e| anyhow!(e))?;
            let parts: Vec<Value> = w
                .parts
                .iter()
                .map(|p| json!({"label": p.label, "claim": p.claim, "edges": p.edges}))
                .collect();
            let stats = json!({"n": n, "d": d, "disjoint": w.is_disjoint()});
            (w.host.clone(), Some(envelope("tree-rigid", None, stats, parts)))
        }
    };
    emit(output, &write_graph(&graph))?;
    if let (Some(path), Some(w)) = (witness, wit) {
        emit(&Some(path.clone()), &json_line(&w))?;
    }
    Ok(())
}

fn part_blocks(g: &Graph, parts: &[&[usize]]) -> String {
    parts
        .iter()
        .map(|p| write_graph(&g.edge_subgraph(p).expect("part ids index the graph")))
        .collect()
}

fn pack_failure(object: &str, seed: u64, err: PackError, io: &Io) -> Run {
    match err {
        PackError::Infeasible(report) => {
            let v = envelope(object, Some(seed), &report, json!({"feasible": false, "deficiency": report.deficiency}));
            emit(&io.output, &json_line(&v))?;
            Err(Failure::Rejected)
        }
        PackError::Unstable(n) => {
            let v = envelope(object, Some(seed), json!({"inconsistent_attempts": n}), json!({"feasible": null}));
            emit(&io.output, &json_line(&v))?;
            Err(Failure::Rejected)
        }
        other => Err(anyhow!(other).into()),
    }
}

fn pack(d: usize, t: usize, seed: u64, verify: bool, io: &Io) -> Run {
    let g = read_input_graph(&io.input)?;
    let p = match pack_rigid(&g, d, t, seed) {
        Ok(p) => p,
        Err(e) => return pack_failure("rigid-packing", seed, e, io),
    };
    let parts: Vec<&[usize]> = p.parts.iter().map(Vec::as_slice).collect();
    let mut text = part_blocks(&g, &parts);
    let v = envelope("rigid-packing", Some(seed), &p.report, json!({"verified": p.verified}));
    text.push_str(&json_line(&v));
    emit(&io.output, &text)?;
    if verify && !p.verified {
        return Err(Failure::Rejected);
    }
    Ok(())
}

fn kriesell(d: usize, seed: u64, verify: bool, io: &Io) -> Run {
    let g = read_input_graph(&io.input)?;
    let p = match pack_tree_rigid(&g, d, seed) {
        Ok(p) => p,
        Err(e) => return pack_failure("tree-rigid-packing", seed, e, io),
    };
    let mut text = part_blocks(&g, &[&p.tree, &p.rigid]);
    let v = envelope("tree-rigid-packing", Some(seed), &p.report, json!({"verified": p.verified}));
    text.push_str(&json_line(&v));
    emit(&io.output, &text)?;
    if verify && !p.verified {
        return Err(Failure::Rejected);
    }
    Ok(())
}

fn orient(k: usize, r: Option<Vec<usize>>, seed: u64, verify: bool, io: &Io) -> Run {
    let g = read_input_graph(&io.input)?;
    let r = match r {
        Some(ids) => Some(RSet::new((4 * k).saturating_sub(4), ids).map_err(|e| anyhow!(e))?),
        None => None,
    };
    let out = match k_connected_orientation(&g, k, r, seed, verify) {
        Ok(out) => out,
        Err(OrientationError::Packing(PackError::Infeasible(report))) => {
            let v = envelope("orientation", Some(seed), &report, json!({"feasible": false}));
            emit(&io.output, &json_line(&v))?;
            return Err(Failure::Rejected);
        }
        Err(OrientationError::Bridge(e)) => {
            let v = envelope("orientation", Some(seed), json!({"k": k}), json!({"bridge": [e.0, e.1]}));
            emit(&io.output, &json_line(&v))?;
            return Err(Failure::Rejected);
        }
        Err(OrientationError::Disconnected(v)) => {
            let v = envelope("orientation", Some(seed), json!({"k": k}), json!({"unreachable": v}));
            emit(&io.output, &json_line(&v))?;
            return Err(Failure::Rejected);
        }
        Err(e) => return Err(anyhow!(e).into()),
    };
    let mut text = write_digraph(&out.digraph);
    let cert = verify.then(|| is_k_connected(&out.digraph, k));
    let v = envelope("orientation", Some(seed), &out.report, &cert);
    text.push_str(&json_line(&v));
    emit(&io.output, &text)?;
    if out.report.verified == Some(false) {
        return Err(Failure::Rejected);
    }
    Ok(())
}

fn verify_cmd(k: usize, digraph: bool, io: &Io) -> Run {
    let text = read_input(&io.input)?;
    let verdict = if digraph {
        let a = read_arcs(&text)?;
        is_k_connected(&a, k)
    } else {
        let g = read_graph(&text)?;
        is_k_connected(&g, k)
    };
    let v = envelope("connectivity", None, json!({"k": k, "connected": verdict.connected}), &verdict.certificate);
    emit(&io.output, &json_line(&v))?;
    if verdict.connected {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn sim_graph(n: Option<usize>, input: &Option<PathBuf>) -> anyhow::Result<Graph> {
    match (n, input) {
        (Some(n), None) => Ok(complete_graph(n)),
        (None, Some(_)) => read_input_graph(input),
        _ => Err(anyhow!("give exactly one of --n or --input")),
    }
}

fn simulate(kind: SimKind, trials: usize, seed: u64) -> Run {
    let (object, payload, verdict) = match kind {
        SimKind::Ordering { size, d } => {
            let mc = min_order_expectation(size, d, OrderMode::MonteCarlo { trials, seed })
                .map_err(|e| anyhow!(e))?;
            let exact = min_order_expectation(size, d, OrderMode::Exact).map_err(|e| anyhow!(e))?;
            let (OrderExpectation::Sampled(est), OrderExpectation::Rational(r)) = (mc, exact) else {
                unreachable!("modes fix the variant");
            };
            let verdict = est.verdict;
            let mut v = serde_json::to_value(&est).map_err(|e| anyhow!(e))?;
            v["exact"] = json!(r.to_string());
            ("ordering", v, verdict)
        }
        SimKind::E0 { n, d, t, input } => {
            let g = sim_graph(n, &input)?;
            let est = estimate_e0_mean(&g, d, t, trials, seed);
            let verdict = est.estimate.verdict;
            ("e0", serde_json::to_value(&est).map_err(|e| anyhow!(e))?, verdict)
        }
        SimKind::Gpd { n, big_d, input } => {
            let g = sim_graph(n, &input)?;
            let est = estimate_gpid_mean(&g, big_d, trials, seed).map_err(|e| anyhow!(e))?;
            let verdict = est.verdict;
            ("gpd", serde_json::to_value(&est).map_err(|e| anyhow!(e))?, verdict)
        }
        SimKind::Chernoff { n, p, eta } => {
            let est = chernoff_check(n, p, eta, trials, seed).map_err(|e| anyhow!(e))?;
            let verdict = est.verdict;
            ("chernoff", serde_json::to_value(&est).map_err(|e| anyhow!(e))?, verdict)
        }
    };
    let v = envelope(object, Some(seed), &payload, json!({"verdict": verdict}));
    emit(&None, &json_line(&v))?;
    if verdict {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn configure_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(s) => Some(s.trim().parse().with_context(|| format!("{THREADS_ENV}={s}"))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Run {
    configure_threads(cli.threads)?;
    match cli.cmd {
        Cmd::Gen { kind, output, witness } => gen(kind, &output, &witness),
        Cmd::Rank { d, seed, io } => {
            let g = read_input_graph(&io.input)?;
            let o = RigidityOracle::new(&g, d, seed, 0).map_err(|e| anyhow!(e))?;
            emit(&io.output, &format!("{}\n", o.rank_d(&g.all_edge_ids())))?;
            Ok(())
        }
        Cmd::Pack { d, t, seed, verify, io } => pack(d, t, seed, verify, &io),
        Cmd::Kriesell { d, seed, verify, io } => kriesell(d, seed, verify, &io),
        Cmd::Orient { k, r, seed, verify, io } => orient(k, r, seed, verify, &io),
        Cmd::Verify { k, digraph, io } => verify_cmd(k, digraph, &io),
        Cmd::Simulate { kind, trials, seed } => simulate(kind, trials, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
