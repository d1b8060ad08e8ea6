//! Deterministic graph generators with fixed vertex labelings.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph};
use crate::matroid::{partition, GraphicOracle, IndependenceOracle, PartitionError};
use crate::rigidity::{binom2, RigidityError, RigidityOracle};
use crate::stream::SeededStream;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("need n >= {need}, got {n}")]
    TooFewVertices { need: usize, n: usize },
    #[error("parameter {name} must be at least {min}")]
    TooSmall { name: &'static str, min: usize },
    #[error("odd degree {k} needs an even vertex count, got {m}")]
    Parity { k: usize, m: usize },
    #[error("host graph is not {k}-regular")]
    NotRegular { k: usize },
    #[error("no {k}-regular host on {m} vertices; bound strict: {}", .bound.strict)]
    HostUnavailable { k: usize, m: usize, bound: DeficiencyBound },
}

pub fn complete_graph(n: usize) -> Graph {
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::new(n, pairs).expect("complete graph is simple")
}

/// Erdős–Rényi graph: each pair independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64, stream: u64) -> Graph {
    let mut rng = SeededStream::new(seed, stream);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Graph::new(n, pairs).expect("pairs are distinct")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    Rigid { d: usize },
    SpanningTree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPart {
    pub label: String,
    pub claim: Claim,
    pub edges: Vec<EdgeId>,
}

/// Edge-disjoint labeled subgraphs of a host, each with a stated property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PackingWitness {
    pub host: Graph,
    pub parts: Vec<WitnessPart>,
}

impl PackingWitness {
    pub fn is_disjoint(&self) -> bool {
        let mut used = vec![false; self.host.m()];
        self.parts
            .iter()
            .flat_map(|p| &p.edges)
            .all(|&e| !std::mem::replace(&mut used[e], true))
    }

    pub fn part_graph(&self, i: usize) -> Graph {
        self.host
            .edge_subgraph(&self.parts[i].edges)
            .expect("part ids index the host")
    }
}

fn ids_of(host: &Graph, pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<EdgeId> {
    let mut ids: Vec<EdgeId> = pairs
        .into_iter()
        .map(|(u, v)| host.edge_id(u, v).expect("pair lies in the host"))
        .collect();
    ids.sort_unstable();
    ids
}

/// `t` edge-disjoint d-rigid spanning subgraphs of `K_n`, `n >= 2td`.
///
/// Block `i` (0-based) owns `V_i^1 = [2di, 2di + d)` and
/// `V_i^2 = [2di + d, 2d(i+1))`; the remaining vertices form `X`. Part `i`
/// is the clique on its block, the edges `V_i^1-V_l^1` and `V_i^2-V_l^2` to
/// earlier blocks, `V_i^1-V_l^2` and `V_i^2-V_l^1` to later blocks, and
/// `V_i^1-X`.
pub fn tdrigid_packing(n: usize, d: usize, t: usize) -> Result<PackingWitness, ConstructionError> {
    if d == 0 {
        return Err(ConstructionError::TooSmall { name: "d", min: 1 });
    }
    if n < 2 * t * d {
        return Err(ConstructionError::TooFewVertices { need: 2 * t * d, n });
    }
    let host = complete_graph(n);
    let first = |i: usize| 2 * d * i..2 * d * i + d;
    let second = |i: usize| 2 * d * i + d..2 * d * (i + 1);
    let rest = 2 * d * t..n;
    let cross = |a: std::ops::Range<usize>, b: std::ops::Range<usize>| {
        a.flat_map(move |u| b.clone().map(move |v| (u.min(v), u.max(v))))
            .collect::<Vec<_>>()
    };
    let parts = (0..t)
        .map(|i| {
            let block = 2 * d * i..2 * d * (i + 1);
            let mut pairs: Vec<(usize, usize)> = block
                .clone()
                .flat_map(|u| (u + 1..block.end).map(move |v| (u, v)))
                .collect();
            for l in 0..t {
                if l < i {
                    pairs.extend(cross(first(i), first(l)));
                    pairs.extend(cross(second(i), second(l)));
                } else if l > i {
                    pairs.extend(cross(first(i), second(l)));
                    pairs.extend(cross(second(i), first(l)));
                }
            }
            pairs.extend(cross(first(i), rest.clone()));
            WitnessPart {
                label: format!("G_{}", i + 1),
                claim: Claim::Rigid { d },
                edges: ids_of(&host, pairs),
            }
        })
        .collect();
    Ok(PackingWitness { host, parts })
}

/// Smallest `a` with `C(a+1, 2) >= d`.
pub fn min_a(d: usize) -> usize {
    (0..).find(|&a| binom2(a + 1) >= d).unwrap()
}

/// A spanning tree of `K_n` whose complement is d-rigid, for
/// `n >= d + a + 2` with `a = min_a(d)`.
///
/// Vertices `u_1..u_{a+1}` get ids `0..=a` and `v_1..v_{d+1}` get ids
/// `a+1..=a+d+1`. With `t_0 = 0`, `t_i = C(i+1, 2)` for `i < a` and
/// `t_a = d`, the tree joins `u_i` to `v_j` for `t_{i-1} < j <= t_i`, plus
/// `v_{d+1} u_{a+1}` and every `u_i u_{a+1}`. Each later vertex adds one tree
/// edge to vertex 0 and rigid edges to vertices `1..=d`.
pub fn tree_rigid_decomposition(n: usize, d: usize) -> Result<PackingWitness, ConstructionError> {
    if d == 0 {
        return Err(ConstructionError::TooSmall { name: "d", min: 1 });
    }
    let a = min_a(d);
    let core = d + a + 2;
    if n < core {
        return Err(ConstructionError::TooFewVertices { need: core, n });
    }
    let u = |i: usize| i - 1;
    let v = |j: usize| a + j;
    let t_of = |i: usize| if i == 0 { 0 } else if i < a { binom2(i + 1) } else { d };
    let mut tree = Vec::new();
    for i in 1..=a {
        for j in t_of(i - 1) + 1..=t_of(i) {
            tree.push((u(i), v(j)));
        }
        tree.push((u(i), u(a + 1)));
    }
    tree.push((u(a + 1), v(d + 1)));
    let mut in_tree = vec![vec![false; core]; core];
    for &(x, y) in &tree {
        in_tree[x][y] = true;
        in_tree[y][x] = true;
    }
    let mut rigid: Vec<(usize, usize)> = (0..core)
        .flat_map(|x| (x + 1..core).map(move |y| (x, y)))
        .filter(|&(x, y)| !in_tree[x][y])
        .collect();
    for x in core..n {
        tree.push((0, x));
        rigid.extend((1..=d).map(|y| (y, x)));
    }
    let host = complete_graph(n);
    let parts = vec![
        WitnessPart {
            label: "T".into(),
            claim: Claim::SpanningTree,
            edges: ids_of(&host, tree.into_iter().map(|(x, y)| (x.min(y), x.max(y)))),
        },
        WitnessPart {
            label: "G_0".into(),
            claim: Claim::Rigid { d },
            edges: ids_of(&host, rigid),
        },
    ];
    Ok(PackingWitness { host, parts })
}

/// Circulant on `m` vertices with offsets `1..=k/2`, plus the antipodal
/// matching when `k` is odd. It is `k`-regular and `k`-connected.
pub fn harary_host(k: usize, m: usize) -> Result<Graph, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::TooSmall { name: "K", min: 2 });
    }
    if m < k + 1 {
        return Err(ConstructionError::TooFewVertices { need: k + 1, n: m });
    }
    if k % 2 == 1 && m % 2 == 1 {
        return Err(ConstructionError::Parity { k, m });
    }
    let mut pairs = Vec::new();
    for i in 0..m {
        for o in 1..=k / 2 {
            let j = (i + o) % m;
            pairs.push((i.min(j), i.max(j)));
        }
    }
    if k % 2 == 1 {
        pairs.extend((0..m / 2).map(|i| (i, i + m / 2)));
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(Graph::new(m, pairs).expect("circulant pairs are valid"))
}

/// Upper bound on the union rank against the rank needed for the packing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeficiencyBound {
    /// Edges between gadgets: `|V_0| K / 2`.
    pub host_edges: usize,
    /// Rank bound of one gadget clique, per dimension: `d_i K - C(d_i+1, 2)`.
    pub gadget_bounds: Vec<usize>,
    /// `host_edges + |V_0| * sum(gadget_bounds)`.
    pub bound: usize,
    /// `sum(d_i |V| - C(d_i+1, 2))`.
    pub target: usize,
    pub strict: bool,
}

impl DeficiencyBound {
    pub fn new(d_list: &[usize], k: usize, host_n: usize) -> Self {
        let host_edges = host_n * k / 2;
        let gadget_bounds: Vec<usize> = d_list.iter().map(|&d| d * k - binom2(d + 1)).collect();
        let bound = host_edges + host_n * gadget_bounds.iter().sum::<usize>();
        let n = host_n * k;
        let target = d_list.iter().map(|&d| d * n - binom2(d + 1)).sum();
        Self {
            host_edges,
            gadget_bounds,
            bound,
            target,
            strict: bound < target,
        }
    }
}

/// A highly connected graph without the requested rigid packing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightExample {
    pub d_list: Vec<usize>,
    pub s: usize,
    /// Connectivity `sum d_i (d_i + 1) - 1`.
    pub k: usize,
    pub graph: Graph,
    pub bound: DeficiencyBound,
}

impl TightExample {
    /// Union rank of `R_{d_1}, ..., R_{d_k}` on the whole graph, with the
    /// graphic matroid standing in for dimension one.
    pub fn union_rank(&self, seed: u64) -> Result<usize, TightRankError> {
        let mut owned: Vec<Box<dyn IndependenceOracle + '_>> = Vec::new();
        for (i, &d) in self.d_list.iter().enumerate() {
            if d == 1 {
                owned.push(Box::new(GraphicOracle::new(&self.graph)));
            } else {
                owned.push(Box::new(RigidityOracle::new(&self.graph, d, seed, i as u64)?));
            }
        }
        let refs: Vec<&dyn IndependenceOracle> = owned.iter().map(|o| o.as_ref()).collect();
        Ok(partition(&refs, &self.graph.all_edge_ids())?.total)
    }
}

#[derive(Debug, Error)]
pub enum TightRankError {
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

pub fn tight_k(d_list: &[usize]) -> usize {
    d_list.iter().map(|&d| d * (d + 1)).sum::<usize>().saturating_sub(1)
}

/// Splits every vertex of a `K`-regular host into a clique of `K` copies,
/// each copy keeping one host edge. Copy `j` of host vertex `v` has id
/// `v K + j` and carries the edge to the `j`-th smallest neighbor of `v`.
pub fn lovasz_yemini_with_host(d_list: &[usize], host: &Graph) -> Result<TightExample, ConstructionError> {
    if d_list.is_empty() || d_list.contains(&0) {
        return Err(ConstructionError::TooSmall { name: "d_i", min: 1 });
    }
    let k = tight_k(d_list);
    if (0..host.n()).any(|v| host.degree(v) != k) {
        return Err(ConstructionError::NotRegular { k });
    }
    let copy = |v: usize, w: usize| v * k + host.neighbors(v).binary_search(&w).unwrap();
    let mut pairs = Vec::with_capacity(host.m() + host.n() * binom2(k));
    for &(v, w) in host.edges() {
        pairs.push((copy(v, w), copy(w, v)));
    }
    for v in 0..host.n() {
        for i in 0..k {
            for j in i + 1..k {
                pairs.push((v * k + i, v * k + j));
            }
        }
    }
    let graph = Graph::new(host.n() * k, pairs).expect("gadget layout is simple");
    Ok(TightExample {
        d_list: d_list.to_vec(),
        s: host.n() / 2,
        k,
        graph,
        bound: DeficiencyBound::new(d_list, k, host.n()),
    })
}

/// The construction on the circulant host with `2s` vertices.
pub fn lovasz_yemini(d_list: &[usize], s: usize) -> Result<TightExample, ConstructionError> {
    if d_list.is_empty() || d_list.contains(&0) {
        return Err(ConstructionError::TooSmall { name: "d_i", min: 1 });
    }
    let k = tight_k(d_list);
    let host = harary_host(k, 2 * s).map_err(|_| ConstructionError::HostUnavailable {
        k,
        m: 2 * s,
        bound: DeficiencyBound::new(d_list, k, 2 * s),
    })?;
    lovasz_yemini_with_host(d_list, &host)
}
