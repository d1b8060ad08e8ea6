//! Orientations with prescribed in-degrees and the k-connected orientation
//! pipeline.
//!
//! [`hakimi_orientation`] solves a flow problem: source -> edge node
//! (capacity 1) -> both endpoints -> vertex -> sink (capacity `g(v)`). A
//! saturating flow picks a head for every edge. When the flow falls short,
//! let `X` be the vertices reachable from the source in the residual network.
//! Every reachable edge node has both endpoints in `X`, so the cut value is
//! `(m - reached) + g(X) < m`, which gives `g(X) < reached <= i(X)`.
//!
//! A (d,R)-orientation has in-degree `d - mult_R(v)` at every vertex, where
//! `R` is a multiset of `C(d+1, 2)` vertices. When the graph has at least
//! `C(d+1, 2)` vertices `R` is an ordinary set.

use serde::Serialize;
use thiserror::Error;

use crate::connectivity::is_k_connected;
use crate::flow::{FlowNetwork, INF};
use crate::graph::{induced_edge_count, Digraph, EdgeId, Graph};
use crate::matroid::{pack_rigid, PackError, PackReport};
use crate::rigidity::binom2;

/// Target in-degree per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSpec {
    g: Vec<usize>,
}

impl DegreeSpec {
    pub fn new(g: Vec<usize>) -> Self {
        Self { g }
    }

    pub fn values(&self) -> &[usize] {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn total(&self) -> usize {
        self.g.iter().sum()
    }

    pub fn sum_over(&self, set: &[usize]) -> usize {
        set.iter().map(|&v| self.g[v]).sum()
    }
}

/// The distinguished multiset of a (d,R)-orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RSet {
    d: usize,
    members: Vec<usize>,
}

impl RSet {
    /// Explicit members; must number exactly `C(d+1, 2)`.
    pub fn new(d: usize, members: Vec<usize>) -> Result<Self, OrientationError> {
        let need = binom2(d + 1);
        if members.len() != need {
            return Err(OrientationError::RSize {
                got: members.len(),
                need,
            });
        }
        Ok(Self { d, members })
    }

    /// The first `C(d+1, 2)` vertex ids, wrapping around when `n` is smaller.
    pub fn first(n: usize, d: usize) -> Self {
        assert!(n > 0, "graph must have vertices");
        Self {
            d,
            members: (0..binom2(d + 1)).map(|i| i % n).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn multiplicity(&self, n: usize) -> Vec<usize> {
        let mut mult = vec![0; n];
        for &r in &self.members {
            mult[r] += 1;
        }
        mult
    }

    /// Number of members, with multiplicity, that lie in `set`.
    pub fn count_in(&self, set: &[usize]) -> usize {
        self.members.iter().filter(|r| set.contains(r)).count()
    }

    /// `g(v) = d - mult(v)`.
    pub fn spec(&self, n: usize) -> Result<DegreeSpec, OrientationError> {
        if let Some(&v) = self.members.iter().find(|&&v| v >= n) {
            return Err(OrientationError::ROutOfRange { v, n });
        }
        let mult = self.multiplicity(n);
        if let Some(v) = (0..n).find(|&v| mult[v] > self.d) {
            return Err(OrientationError::RMultiplicity { v, mult: mult[v] });
        }
        Ok(DegreeSpec::new(mult.iter().map(|m| self.d - m).collect()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Feasible,
    CountMismatch,
    ViolatingSet,
}

/// Outcome of a degree-specified orientation. For `CountMismatch`,
/// `lhs = |E|` and `rhs = g(V)`; for `ViolatingSet`, `lhs = i(X)` and
/// `rhs = g(X)` with `lhs > rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationCertificate {
    pub kind: CertificateKind,
    pub set: Option<Vec<usize>>,
    pub lhs: usize,
    pub rhs: usize,
}

impl OrientationCertificate {
    /// Re-derives the stated inequality from the graph.
    pub fn holds(&self, g: &Graph, spec: &DegreeSpec) -> bool {
        match self.kind {
            CertificateKind::Feasible => false,
            CertificateKind::CountMismatch => {
                self.lhs == g.m() && self.rhs == spec.total() && self.lhs != self.rhs
            }
            CertificateKind::ViolatingSet => self.set.as_ref().is_some_and(|x| {
                !x.is_empty()
                    && induced_edge_count(g, x) == Ok(self.lhs)
                    && spec.sum_over(x) == self.rhs
                    && self.lhs > self.rhs
            }),
        }
    }
}

#[derive(Debug, Error)]
pub enum OrientationError {
    #[error("R must have C(d+1,2) = {need} members, got {got}")]
    RSize { got: usize, need: usize },
    #[error("R member {v} out of range for n = {n}")]
    ROutOfRange { v: usize, n: usize },
    #[error("vertex {v} appears {mult} times in R, more than d")]
    RMultiplicity { v: usize, mult: usize },
    #[error("base has {got} edges, a minimally d-rigid graph has {expected}")]
    NotMinimallyRigid { got: usize, expected: usize },
    #[error("base violates the sparsity count on {:?}", .0.set)]
    SparsityViolated(OrientationCertificate),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("need at least k + 1 = {need} vertices, graph has {n}")]
    TooFewVertices { need: usize, n: usize },
    #[error("graph is disconnected; vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("edge {0:?} is a bridge")]
    Bridge((usize, usize)),
    #[error(transparent)]
    Packing(#[from] PackError),
}

/// Orientation with out-degree at least `floor(deg / 2)` everywhere, from
/// Eulerian circuits after joining odd-degree vertices to an extra vertex.
pub fn balanced_orientation(g: &Graph) -> Digraph {
    let n = g.n();
    let aux = n;
    let mut ends: Vec<(usize, usize)> = g.edges().to_vec();
    for v in (0..n).filter(|&v| g.degree(v) % 2 == 1) {
        ends.push((v, aux));
    }
    let mut incident = vec![Vec::new(); n + 1];
    for (e, &(u, v)) in ends.iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    let mut used = vec![false; ends.len()];
    let mut cursor = vec![0usize; n + 1];
    let mut tail = vec![0usize; ends.len()];
    for start in 0..=n {
        let mut stack = vec![start];
        while let Some(&a) = stack.last() {
            while cursor[a] < incident[a].len() && used[incident[a][cursor[a]]] {
                cursor[a] += 1;
            }
            if cursor[a] == incident[a].len() {
                stack.pop();
                continue;
            }
            let e = incident[a][cursor[a]];
            used[e] = true;
            tail[e] = a;
            let (u, v) = ends[e];
            stack.push(if u == a { v } else { u });
        }
    }
    let forward = (0..g.m()).map(|e| tail[e] == g.edge(e).0).collect();
    Digraph::new(g.clone(), forward)
}

/// Orientation with in-degree exactly `spec[v]` at every vertex, or a
/// certificate that none exists.
pub fn hakimi_orientation(g: &Graph, spec: &DegreeSpec) -> Result<Digraph, OrientationCertificate> {
    assert_eq!(spec.len(), g.n(), "one target per vertex");
    let (n, m) = (g.n(), g.m());
    if spec.total() != m {
        return Err(OrientationCertificate {
            kind: CertificateKind::CountMismatch,
            set: None,
            lhs: m,
            rhs: spec.total(),
        });
    }
    let source = 0;
    let edge_node = |e: usize| 1 + e;
    let vertex_node = |v: usize| 1 + m + v;
    let sink = 1 + m + n;
    let mut net = FlowNetwork::new(sink + 1);
    let mut to_first = Vec::with_capacity(m);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        net.add_arc(source, edge_node(e), 1);
        to_first.push(net.add_arc(edge_node(e), vertex_node(u), INF));
        net.add_arc(edge_node(e), vertex_node(v), INF);
    }
    for v in 0..n {
        let cap = u32::try_from(spec.values()[v]).unwrap_or(INF).min(INF);
        net.add_arc(vertex_node(v), sink, cap);
    }
    let flow = net.max_flow(source, sink, m as u64);
    if flow == m as u64 {
        let heads: Vec<usize> = g
            .edges()
            .iter()
            .zip(&to_first)
            .map(|(&(u, v), &id)| if net.flow(id) > 0 { u } else { v })
            .collect();
        return Ok(Digraph::from_heads(g.clone(), &heads));
    }
    let reach = net.residual_reachable(source);
    let set: Vec<usize> = (0..n).filter(|&v| reach[vertex_node(v)]).collect();
    let lhs = induced_edge_count(g, &set).expect("ids in range");
    let rhs = spec.sum_over(&set);
    Err(OrientationCertificate {
        kind: CertificateKind::ViolatingSet,
        set: Some(set),
        lhs,
        rhs,
    })
}

/// (d,R)-orientation of a minimally d-rigid base.
pub fn dr_orientation(base: &Graph, r: &RSet) -> Result<Digraph, OrientationError> {
    let n = base.n();
    let spec = r.spec(n)?;
    let expected = (r.d() * n).saturating_sub(binom2(r.d() + 1));
    if base.m() != expected {
        return Err(OrientationError::NotMinimallyRigid {
            got: base.m(),
            expected,
        });
    }
    hakimi_orientation(base, &spec).map_err(OrientationError::SparsityViolated)
}

/// Vertices outside `set` with an arc into `set`.
pub fn set_in_neighbors(dg: &Digraph, set: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; dg.n()];
    for &v in set {
        inside[v] = true;
    }
    let mut seen = vec![false; dg.n()];
    for (a, b) in dg.arcs() {
        if inside[b] && !inside[a] {
            seen[a] = true;
        }
    }
    (0..dg.n()).filter(|&v| seen[v]).collect()
}

/// Strongly connected orientation of a 2-edge-connected graph: tree edges
/// away from the DFS root, back edges toward it.
pub fn robbins_orientation(g: &Graph) -> Result<Digraph, OrientationError> {
    let n = g.n();
    if n < 2 {
        return Err(OrientationError::TooFewVertices { need: 2, n });
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut cursor = vec![0; n];
    let mut forward = vec![false; g.m()];
    let mut oriented = vec![false; g.m()];
    let mut time = 0;
    disc[0] = 0;
    low[0] = 0;
    let mut stack = vec![0];
    while let Some(&a) = stack.last() {
        if cursor[a] < g.degree(a) {
            let b = g.neighbors(a)[cursor[a]];
            cursor[a] += 1;
            let e = g.edge_id(a, b).expect("neighbor edge exists");
            if e == parent_edge[a] || oriented[e] {
                continue;
            }
            oriented[e] = true;
            forward[e] = a < b; // a -> b
            if disc[b] == usize::MAX {
                time += 1;
                disc[b] = time;
                low[b] = time;
                parent_edge[b] = e;
                stack.push(b);
            } else {
                low[a] = low[a].min(disc[b]);
            }
        } else {
            stack.pop();
            if let Some(&p) = stack.last() {
                low[p] = low[p].min(low[a]);
                if low[a] > disc[p] {
                    return Err(OrientationError::Bridge(g.edge(parent_edge[a])));
                }
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| disc[v] == usize::MAX) {
        return Err(OrientationError::Disconnected(v));
    }
    Ok(Digraph::new(g.clone(), forward))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationReport {
    pub k: usize,
    pub d: usize,
    #[serde(rename = "R")]
    pub r: Vec<usize>,
    pub base_sizes: Vec<usize>,
    /// `None` unless verification was requested.
    pub verified: Option<bool>,
    pub seed: u64,
    pub packing: Option<PackReport>,
}

#[derive(Clone, Debug)]
pub struct KOrientation {
    pub digraph: Digraph,
    /// The two oriented bases for `k >= 2`: the first with in-degrees
    /// `g_{d,R}`, the second with out-degrees `g_{d,R}`.
    pub bases: Vec<Digraph>,
    pub report: OrientationReport,
}

/// Orientation intended to be k-connected. For `k = 1` this is the DFS
/// orientation; for `k >= 2`, two disjoint `(4k-4)`-rigid bases are packed,
/// the first gets a (d,R)-orientation, the second a reversed one, and all
/// other edges point from the lower to the higher id.
pub fn k_connected_orientation(
    g: &Graph,
    k: usize,
    r: Option<RSet>,
    seed: u64,
    verify: bool,
) -> Result<KOrientation, OrientationError> {
    if k == 0 {
        return Err(OrientationError::ZeroK);
    }
    if g.n() < k + 1 {
        return Err(OrientationError::TooFewVertices { need: k + 1, n: g.n() });
    }
    let verdict = |dg: &Digraph| verify.then(|| is_k_connected(dg, k).connected);
    if k == 1 {
        let digraph = robbins_orientation(g)?;
        let report = OrientationReport {
            k,
            d: 0,
            r: Vec::new(),
            base_sizes: Vec::new(),
            verified: verdict(&digraph),
            seed,
            packing: None,
        };
        return Ok(KOrientation {
            digraph,
            bases: Vec::new(),
            report,
        });
    }

    let d = 4 * k - 4;
    let r = match r {
        Some(r) if r.d() != d => return Err(OrientationError::RSize {
            got: r.members().len(),
            need: binom2(d + 1),
        }),
        Some(r) => r,
        None => RSet::first(g.n(), d),
    };
    r.spec(g.n())?;
    let packing = pack_rigid(g, d, 2, seed)?;
    let mut forward = vec![true; g.m()];
    let mut bases = Vec::with_capacity(2);
    for (i, part) in packing.parts.iter().enumerate() {
        let base = g.edge_subgraph(part).expect("part ids are valid");
        let mut dg = dr_orientation(&base, &r)?;
        if i == 1 {
            dg = dg.reversed();
        }
        for (tail, head) in dg.arcs() {
            let e: EdgeId = g.edge_id(tail, head).expect("base edge lies in host");
            forward[e] = tail < head;
        }
        bases.push(dg);
    }
    let digraph = Digraph::new(g.clone(), forward);
    let report = OrientationReport {
        k,
        d,
        r: r.members().to_vec(),
        base_sizes: packing.parts.iter().map(Vec::len).collect(),
        verified: verdict(&digraph),
        seed,
        packing: Some(packing.report),
    };
    Ok(KOrientation {
        digraph,
        bases,
        report,
    })
}
