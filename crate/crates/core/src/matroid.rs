//! Matroid partition over pluggable independence oracles.
//!
//! [`partition`] finds disjoint sets `F_1, ..., F_t` with `F_i` independent in
//! oracle `i` and `sum |F_i|` maximum. It starts from a greedy assignment and
//! then repeatedly augments along a shortest path of the exchange digraph:
//!
//! * `x -> sink_i` when `F_i + x` is independent;
//! * `x -> y` for `y in F_i` when `F_i + x` is dependent and `F_i + x - y` is
//!   independent, i.e. `y` lies in the fundamental circuit of `x` in `F_i`.
//!
//! Sources are the uncovered elements in edge-id order, arcs are explored
//! breadth first with parts and circuit members in ascending order, so runs
//! are reproducible. Every part touched by an augmentation is re-validated by
//! rebuilding its exchange structure; a rejection is reported as
//! [`PartitionError::Inconsistent`] so that callers can reseed and retry.

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph};
use crate::rigidity::{complete_rank, RigidityError, RigidityOracle};

/// Independence oracle on the edge ids of a host graph.
pub trait IndependenceOracle: Sync {
    fn ground_size(&self) -> usize;

    fn rank(&self, set: &[EdgeId]) -> usize;

    fn is_independent(&self, set: &[EdgeId]) -> bool {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == set.len() && self.rank(set) == set.len()
    }

    /// Exchange structure for an independent set, or `None` if the oracle
    /// rejects the set. The default answers circuit queries with direct rank
    /// queries.
    fn exchange<'a>(&'a self, independent: &[EdgeId]) -> Option<Box<dyn Exchange + 'a>> {
        rank_exchange(self, independent).map(|ex| Box::new(ex) as Box<dyn Exchange + 'a>)
    }

    fn label(&self) -> String;
}

/// Incremental view of one independent set.
pub trait Exchange: Sync {
    fn members(&self) -> &[EdgeId];

    /// `None` when `members + x` is independent; otherwise the members `y`
    /// with `members + x - y` independent, ascending.
    fn circuit(&self, x: EdgeId) -> Option<Vec<EdgeId>>;

    /// Adds `x` when the set stays independent.
    fn try_insert(&mut self, x: EdgeId) -> bool;
}

/// Circuit queries answered purely through `rank`.
pub struct RankExchange<'a, O: ?Sized> {
    oracle: &'a O,
    members: Vec<EdgeId>,
}

pub fn rank_exchange<'a, O>(oracle: &'a O, independent: &[EdgeId]) -> Option<RankExchange<'a, O>>
where
    O: IndependenceOracle + ?Sized,
{
    oracle.is_independent(independent).then(|| RankExchange {
        oracle,
        members: independent.to_vec(),
    })
}

impl<O: IndependenceOracle + ?Sized> Exchange for RankExchange<'_, O> {
    fn members(&self) -> &[EdgeId] {
        &self.members
    }

    fn circuit(&self, x: EdgeId) -> Option<Vec<EdgeId>> {
        let mut with_x = self.members.clone();
        with_x.push(x);
        let k = self.members.len();
        if self.oracle.rank(&with_x) == k + 1 {
            return None;
        }
        let mut c: Vec<EdgeId> = (0..k)
            .filter(|&i| {
                let mut swapped = with_x.clone();
                swapped.swap_remove(i);
                self.oracle.rank(&swapped) == k
            })
            .map(|i| self.members[i])
            .collect();
        c.sort_unstable();
        Some(c)
    }

    fn try_insert(&mut self, x: EdgeId) -> bool {
        let mut with_x = self.members.clone();
        with_x.push(x);
        if self.oracle.rank(&with_x) == with_x.len() {
            self.members = with_x;
            true
        } else {
            false
        }
    }
}

/// The graphic matroid (`R_1`) of a host graph.
pub struct GraphicOracle<'g> {
    graph: &'g Graph,
}

impl<'g> GraphicOracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self { graph }
    }
}

struct ForestExchange<'g> {
    graph: &'g Graph,
    members: Vec<EdgeId>,
    // incident forest edges per vertex
    incident: Vec<Vec<EdgeId>>,
    components: UnionFind<usize>,
}

impl ForestExchange<'_> {
    fn path(&self, from: usize, to: usize) -> Vec<EdgeId> {
        let n = self.graph.n();
        let mut via = vec![usize::MAX; n];
        via[from] = usize::MAX - 1;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(a) = queue.pop_front() {
            if a == to {
                break;
            }
            for &e in &self.incident[a] {
                let (u, v) = self.graph.edge(e);
                let b = if u == a { v } else { u };
                if via[b] == usize::MAX {
                    via[b] = e;
                    queue.push_back(b);
                }
            }
        }
        let mut path = Vec::new();
        let mut w = to;
        while w != from {
            let e = via[w];
            path.push(e);
            let (u, v) = self.graph.edge(e);
            w = if u == w { v } else { u };
        }
        path.sort_unstable();
        path
    }
}

impl Exchange for ForestExchange<'_> {
    fn members(&self) -> &[EdgeId] {
        &self.members
    }

    fn circuit(&self, x: EdgeId) -> Option<Vec<EdgeId>> {
        let (u, v) = self.graph.edge(x);
        if !self.components.equiv(u, v) {
            return None;
        }
        Some(self.path(u, v))
    }

    fn try_insert(&mut self, x: EdgeId) -> bool {
        let (u, v) = self.graph.edge(x);
        if !self.components.union(u, v) {
            return false;
        }
        self.incident[u].push(x);
        self.incident[v].push(x);
        self.members.push(x);
        true
    }
}

impl IndependenceOracle for GraphicOracle<'_> {
    fn ground_size(&self) -> usize {
        self.graph.m()
    }

    fn rank(&self, set: &[EdgeId]) -> usize {
        let mut uf = UnionFind::<usize>::new(self.graph.n());
        set.iter()
            .filter(|&&e| {
                let (u, v) = self.graph.edge(e);
                uf.union(u, v)
            })
            .count()
    }

    fn exchange<'a>(&'a self, independent: &[EdgeId]) -> Option<Box<dyn Exchange + 'a>> {
        let mut ex = ForestExchange {
            graph: self.graph,
            members: Vec::with_capacity(independent.len()),
            incident: vec![Vec::new(); self.graph.n()],
            components: UnionFind::new(self.graph.n()),
        };
        for &e in independent {
            if !ex.try_insert(e) {
                return None;
            }
        }
        Some(Box::new(ex))
    }

    fn label(&self) -> String {
        "graphic".into()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("at least one oracle is required")]
    NoOracles,
    #[error("oracles disagree on the ground set size")]
    GroundMismatch,
    #[error("element {e} outside the ground set of size {size}")]
    OutOfRange { e: EdgeId, size: usize },
    #[error("oracle {part} rejected an augmented part; reseed and retry")]
    Inconsistent { part: usize },
}

/// Disjoint independent sets of maximum total size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatroidPartition {
    pub parts: Vec<Vec<EdgeId>>,
    pub total: usize,
}

impl MatroidPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }
}

/// Arcs leaving one node of the exchange digraph.
enum Arcs {
    Sink(usize),
    To(Vec<EdgeId>),
}

pub fn partition(
    oracles: &[&dyn IndependenceOracle],
    ground: &[EdgeId],
) -> Result<MatroidPartition, PartitionError> {
    let t = oracles.len();
    if t == 0 {
        return Err(PartitionError::NoOracles);
    }
    let size = oracles[0].ground_size();
    if oracles.iter().any(|o| o.ground_size() != size) {
        return Err(PartitionError::GroundMismatch);
    }
    let mut ground = ground.to_vec();
    ground.sort_unstable();
    ground.dedup();
    if let Some(&e) = ground.iter().find(|&&e| e >= size) {
        return Err(PartitionError::OutOfRange { e, size });
    }

    let mut owner: Vec<Option<usize>> = vec![None; size];
    let mut ex: Vec<Box<dyn Exchange + '_>> = Vec::with_capacity(t);
    for (i, o) in oracles.iter().enumerate() {
        ex.push(o.exchange(&[]).ok_or(PartitionError::Inconsistent { part: i })?);
    }
    for &x in &ground {
        if let Some(i) = (0..t).find(|&i| ex[i].try_insert(x)) {
            owner[x] = Some(i);
        }
    }

    loop {
        let sources: Vec<EdgeId> = ground.iter().copied().filter(|&x| owner[x].is_none()).collect();
        if sources.is_empty() {
            break;
        }
        let Some((path, sink)) = shortest_augmenting_path(&ex, &owner, &sources) else {
            break;
        };
        let mut touched = vec![false; t];
        let last = *path.last().unwrap();
        let mut new_owner: Vec<(EdgeId, usize)> = vec![(last, sink)];
        touched[sink] = true;
        for w in path.windows(2) {
            let part = owner[w[1]].expect("interior path nodes are covered");
            new_owner.push((w[0], part));
            touched[part] = true;
        }
        for (x, part) in new_owner {
            owner[x] = Some(part);
        }
        for i in (0..t).filter(|&i| touched[i]) {
            let members: Vec<EdgeId> =
                ground.iter().copied().filter(|&x| owner[x] == Some(i)).collect();
            ex[i] = oracles[i]
                .exchange(&members)
                .ok_or(PartitionError::Inconsistent { part: i })?;
        }
    }

    let mut parts = vec![Vec::new(); t];
    for &x in &ground {
        if let Some(i) = owner[x] {
            parts[i].push(x);
        }
    }
    let total = parts.iter().map(Vec::len).sum();
    Ok(MatroidPartition { parts, total })
}

/// Breadth-first search from all sources; returns the node path and the
/// part whose sink ends it.
fn shortest_augmenting_path(
    ex: &[Box<dyn Exchange + '_>],
    owner: &[Option<usize>],
    sources: &[EdgeId],
) -> Option<(Vec<EdgeId>, usize)> {
    let t = ex.len();
    let mut parent: Vec<Option<EdgeId>> = vec![None; owner.len()];
    let mut visited = vec![false; owner.len()];
    for &s in sources {
        visited[s] = true;
    }
    let mut layer = sources.to_vec();
    while !layer.is_empty() {
        let arcs: Vec<Vec<Arcs>> = layer
            .par_iter()
            .map(|&x| {
                let mut out = Vec::new();
                for i in (0..t).filter(|&i| owner[x] != Some(i)) {
                    match ex[i].circuit(x) {
                        None => {
                            out.push(Arcs::Sink(i));
                            break;
                        }
                        Some(c) => out.push(Arcs::To(c)),
                    }
                }
                out
            })
            .collect();
        let mut next = Vec::new();
        for (&x, out) in layer.iter().zip(arcs) {
            for a in out {
                match a {
                    Arcs::Sink(i) => {
                        let mut path = vec![x];
                        let mut w = x;
                        while let Some(p) = parent[w] {
                            path.push(p);
                            w = p;
                        }
                        path.reverse();
                        return Some((path, i));
                    }
                    Arcs::To(ys) => {
                        for y in ys {
                            if !visited[y] {
                                visited[y] = true;
                                parent[y] = Some(x);
                                next.push(y);
                            }
                        }
                    }
                }
            }
        }
        layer = next;
    }
    None
}

/// Rank of `set` in the union of the oracles' matroids.
pub fn rank_union(oracles: &[&dyn IndependenceOracle], set: &[EdgeId]) -> Result<usize, PartitionError> {
    Ok(partition(oracles, set)?.total)
}

#[derive(Debug, Error)]
pub enum PackError {
    #[error("need at least d + 1 = {need} vertices, graph has {n}")]
    TooFewVertices { need: usize, n: usize },
    #[error("packing infeasible: achieved part sizes {:?}, targets {:?}", .0.sizes, .0.targets)]
    Infeasible(PackReport),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error("oracle stayed inconsistent after {0} attempts")]
    Unstable(usize),
}

/// Outcome of a packing attempt, successful or not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PackReport {
    pub sizes: Vec<usize>,
    pub targets: Vec<usize>,
    pub total: usize,
    pub deficiency: usize,
    pub seed: u64,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RigidPacking {
    pub d: usize,
    pub parts: Vec<Vec<EdgeId>>,
    /// Every part re-checked independent and spanning under a fresh realization.
    pub verified: bool,
    pub report: PackReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeRigidPacking {
    pub d: usize,
    pub tree: Vec<EdgeId>,
    pub rigid: Vec<EdgeId>,
    pub verified: bool,
    pub report: PackReport,
}

/// Independent realizations are drawn from disjoint streams: stream
/// `attempt * STREAM_STRIDE + i` for oracle `i`, and the verification pass
/// uses the stream block after the last attempt.
const STREAM_STRIDE: u64 = 1 << 16;
const ATTEMPTS: usize = 2;

type Builder<'a, 'g> = &'a dyn Fn(u64) -> Result<Box<dyn IndependenceOracle + 'g>, RigidityError>;

fn attempt_partition<'g>(
    graph: &'g Graph,
    builders: &[Builder<'_, 'g>],
    targets: &[usize],
    seed: u64,
) -> Result<(MatroidPartition, PackReport), PackError> {
    let mut last = None;
    let mut inconsistent = 0;
    for attempt in 0..ATTEMPTS {
        let oracles = builders
            .iter()
            .enumerate()
            .map(|(i, b)| b(attempt as u64 * STREAM_STRIDE + i as u64))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&dyn IndependenceOracle> = oracles.iter().map(|o| o.as_ref()).collect();
        let p = match partition(&refs, &graph.all_edge_ids()) {
            Ok(p) => p,
            Err(PartitionError::Inconsistent { .. }) => {
                inconsistent += 1;
                continue;
            }
            Err(e) => unreachable!("partition inputs are well formed: {e}"),
        };
        let sizes = p.sizes();
        let deficiency = targets
            .iter()
            .zip(&sizes)
            .map(|(t, s)| t.saturating_sub(*s))
            .sum();
        let report = PackReport {
            sizes,
            targets: targets.to_vec(),
            total: p.total,
            deficiency,
            seed,
            attempts: attempt + 1,
        };
        if deficiency == 0 {
            return Ok((p, report));
        }
        last = Some(report);
    }
    match last {
        Some(r) => Err(PackError::Infeasible(r)),
        None => Err(PackError::Unstable(inconsistent)),
    }
}

/// `t` edge-disjoint minimally d-rigid spanning subgraphs of `g`, found by
/// partitioning the edges over `t` independent rigidity oracles.
pub fn pack_rigid<'g>(g: &'g Graph, d: usize, t: usize, seed: u64) -> Result<RigidPacking, PackError> {
    let n = g.n();
    if n < d + 1 {
        return Err(PackError::TooFewVertices { need: d + 1, n });
    }
    let target = complete_rank(n, d);
    let build = |stream: u64| {
        RigidityOracle::new(g, d, seed, stream).map(|o| Box::new(o) as Box<dyn IndependenceOracle + 'g>)
    };
    let builders: Vec<Builder<'_, 'g>> = vec![&build; t];
    let (p, report) = attempt_partition(g, &builders, &vec![target; t], seed)?;
    let verify_stream = ATTEMPTS as u64 * STREAM_STRIDE;
    let verified = p.parts.iter().enumerate().all(|(i, part)| {
        verify_rigid_part(g, part, d, seed, verify_stream + i as u64).unwrap_or(false)
    });
    Ok(RigidPacking {
        d,
        parts: p.parts,
        verified,
        report,
    })
}

/// Disjoint spanning tree and minimally d-rigid spanning subgraph.
pub fn pack_tree_rigid<'g>(g: &'g Graph, d: usize, seed: u64) -> Result<TreeRigidPacking, PackError> {
    let n = g.n();
    if n < d + 1 {
        return Err(PackError::TooFewVertices { need: d + 1, n });
    }
    let graphic =
        |_: u64| Ok(Box::new(GraphicOracle::new(g)) as Box<dyn IndependenceOracle + 'g>);
    let rigid = |stream: u64| {
        RigidityOracle::new(g, d, seed, stream).map(|o| Box::new(o) as Box<dyn IndependenceOracle + 'g>)
    };
    let builders: Vec<Builder<'_, 'g>> = vec![&graphic, &rigid];
    let targets = [n - 1, complete_rank(n, d)];
    let (mut p, report) = attempt_partition(g, &builders, &targets, seed)?;
    let rigid_part = p.parts.pop().unwrap();
    let tree = p.parts.pop().unwrap();
    let verify_stream = ATTEMPTS as u64 * STREAM_STRIDE;
    let verified = is_spanning_tree(g, &tree)
        && verify_rigid_part(g, &rigid_part, d, seed, verify_stream)?;
    Ok(TreeRigidPacking {
        d,
        tree,
        rigid: rigid_part,
        verified,
        report,
    })
}

/// Checks under a fresh realization that `part` is a base of `R_d` of the
/// complete graph on the vertex set of `g`.
pub fn verify_rigid_part(
    g: &Graph,
    part: &[EdgeId],
    d: usize,
    seed: u64,
    stream: u64,
) -> Result<bool, RigidityError> {
    let o = RigidityOracle::new(g, d, seed, stream)?;
    Ok(part.len() == complete_rank(g.n(), d) && o.is_independent(part))
}

pub fn is_spanning_tree(g: &Graph, part: &[EdgeId]) -> bool {
    g.n() > 0 && part.len() == g.n() - 1 && GraphicOracle::new(g).is_independent(part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::complete_graph;

    #[test]
    fn single_oracle_gives_maximal_independent_set() {
        let k5 = complete_graph(5);
        let g = GraphicOracle::new(&k5);
        let p = partition(&[&g], &k5.all_edge_ids()).unwrap();
        assert_eq!(p.total, 4);
        assert!(is_spanning_tree(&k5, &p.parts[0]));
    }

    #[test]
    fn k4_two_spanning_trees() {
        let k4 = complete_graph(4);
        let g = GraphicOracle::new(&k4);
        let p = partition(&[&g, &g], &k4.all_edge_ids()).unwrap();
        assert_eq!(p.total, 6);
        assert!(p.parts.iter().all(|part| is_spanning_tree(&k4, part)));
    }

    #[test]
    fn errors() {
        let k3 = complete_graph(3);
        let k4 = complete_graph(4);
        let a = GraphicOracle::new(&k3);
        let b = GraphicOracle::new(&k4);
        assert_eq!(partition(&[], &[]), Err(PartitionError::NoOracles));
        assert_eq!(partition(&[&a, &b], &[]), Err(PartitionError::GroundMismatch));
        assert_eq!(
            partition(&[&a], &[3]),
            Err(PartitionError::OutOfRange { e: 3, size: 3 })
        );
    }

    #[test]
    fn cycle_is_not_rigid_in_the_plane() {
        let c5 = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        match pack_rigid(&c5, 2, 1, 0) {
            Err(PackError::Infeasible(r)) => {
                assert_eq!(r.sizes, vec![5]);
                assert_eq!(r.targets, vec![7]);
                assert_eq!(r.deficiency, 2);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn tree_cannot_hold_two_spanning_connected_parts() {
        let path = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(matches!(pack_tree_rigid(&path, 1, 0), Err(PackError::Infeasible(_))));
    }

    #[test]
    fn too_few_vertices() {
        let k2 = complete_graph(2);
        assert!(matches!(
            pack_rigid(&k2, 2, 1, 0),
            Err(PackError::TooFewVertices { need: 3, n: 2 })
        ));
    }
}
