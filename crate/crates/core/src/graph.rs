//! Simple graphs, orientations, vertex orderings and the edge-list text format.
//!
//! Vertices are dense ids `0..n`. Edges are stored in canonical order
//! (lexicographic, `u < v` inside each pair) and an edge is identified by its
//! position in that order, so every edge subset exchanged between modules is a
//! list of edge indices.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

/// Index of an edge in the canonical edge sequence of its graph.
pub type EdgeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: loop at vertex {v}")]
    Loop { line: usize, v: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    Duplicate { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex id {v} out of range for n = {n}")]
    OutOfRange { line: usize, v: usize, n: usize },
    #[error("vertex id {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("edge id {e} out of range for m = {m}")]
    EdgeOutOfRange { e: usize, m: usize },
    #[error("ordering is not a permutation of 0..{n}")]
    NotPermutation { n: usize },
}

/// A simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from arbitrary pairs; pairs are normalized and sorted.
    /// Line numbers in errors are the 1-based position of the offending pair.
    pub fn new<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_numbered(n, pairs.into_iter().enumerate().map(|(i, p)| (i + 1, p)))
    }

    fn from_numbered<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, (usize, usize))>,
    {
        let mut tagged = Vec::new();
        for (line, (a, b)) in pairs {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::OutOfRange { line, v, n });
                }
            }
            if a == b {
                return Err(GraphError::Loop { line, v: a });
            }
            tagged.push(((a.min(b), a.max(b)), line));
        }
        tagged.sort();
        for w in tagged.windows(2) {
            if w[0].0 == w[1].0 {
                let (u, v) = w[1].0;
                let line = w[0].1.max(w[1].1);
                return Err(GraphError::Duplicate { line, u, v });
            }
        }
        let edges: Vec<_> = tagged.into_iter().map(|(e, _)| e).collect();
        Ok(Self::from_canonical(n, edges))
    }

    /// `edges` must already be canonical (sorted, `u < v`, no duplicates).
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v && v < n));
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (usize, usize) {
        self.edges[e]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Position of the edge `{u, v}` in the canonical order.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<EdgeId> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn all_edge_ids(&self) -> Vec<EdgeId> {
        (0..self.m()).collect()
    }

    /// Spanning subgraph on the same vertex set keeping the listed edges.
    /// Edge `i` of the result is the `i`-th smallest id of `ids`.
    pub fn edge_subgraph(&self, ids: &[EdgeId]) -> Result<Graph, GraphError> {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&e) = sorted.iter().find(|&&e| e >= self.m()) {
            return Err(GraphError::EdgeOutOfRange { e, m: self.m() });
        }
        Ok(Self::from_canonical(
            self.n,
            sorted.iter().map(|&e| self.edges[e]).collect(),
        ))
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v, n: self.n })
        }
    }
}

/// Number of edges with both endpoints in `set`.
pub fn induced_edge_count(g: &Graph, set: &[usize]) -> Result<usize, GraphError> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        g.check_vertex(v)?;
        inside[v] = true;
    }
    Ok(g.edges().iter().filter(|&&(u, v)| inside[u] && inside[v]).count())
}

/// A permutation of the vertex ids together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrdering {
    perm: Vec<usize>,
    position: Vec<usize>,
}

impl VertexOrdering {
    pub fn new(perm: Vec<usize>) -> Result<Self, GraphError> {
        let n = perm.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in perm.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(GraphError::NotPermutation { n });
            }
            position[v] = i;
        }
        Ok(Self { perm, position })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn precedes(&self, u: usize, v: usize) -> bool {
        self.position[u] < self.position[v]
    }
}

/// Neighbors of `v` that come before `v` in `order`, sorted by id.
pub fn back_neighbors(
    g: &Graph,
    order: &VertexOrdering,
    v: usize,
) -> Result<Vec<usize>, GraphError> {
    g.check_vertex(v)?;
    if order.len() != g.n() {
        return Err(GraphError::NotPermutation { n: g.n() });
    }
    Ok(g
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&u| order.precedes(u, v))
        .collect())
}

/// An orientation of a parent graph: `forward[e]` means edge `(u, v)` with
/// `u < v` is directed `u -> v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    graph: Graph,
    forward: Vec<bool>,
}

impl Digraph {
    pub fn new(graph: Graph, forward: Vec<bool>) -> Self {
        assert_eq!(graph.m(), forward.len(), "one direction flag per edge");
        Self { graph, forward }
    }

    /// Orientation from an explicit head per edge.
    pub fn from_heads(graph: Graph, heads: &[usize]) -> Self {
        let forward = graph
            .edges()
            .iter()
            .zip(heads)
            .map(|(&(_, v), &h)| h == v)
            .collect();
        Self::new(graph, forward)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn forward_flags(&self) -> &[bool] {
        &self.forward
    }

    /// `(tail, head)` of edge `e`.
    pub fn arc(&self, e: EdgeId) -> (usize, usize) {
        let (u, v) = self.graph.edge(e);
        if self.forward[e] {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m()).map(|e| self.arc(e))
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for (_, h) in self.arcs() {
            deg[h] += 1;
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for (t, _) in self.arcs() {
            deg[t] += 1;
        }
        deg
    }

    pub fn out_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<_> = self.arcs().filter(|&(t, _)| t == v).map(|(_, h)| h).collect();
        out.sort_unstable();
        out
    }

    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        let mut inn: Vec<_> = self.arcs().filter(|&(_, h)| h == v).map(|(t, _)| t).collect();
        inn.sort_unstable();
        inn
    }

    /// Flips every arc.
    pub fn reversed(&self) -> Self {
        Self {
            graph: self.graph.clone(),
            forward: self.forward.iter().map(|f| !f).collect(),
        }
    }
}

/// A simple digraph given by arbitrary arcs; antiparallel pairs are allowed.
/// Used for connectivity checks and for reading digraph files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcSet {
    n: usize,
    out: Vec<Vec<usize>>,
    m: usize,
}

impl ArcSet {
    pub fn new<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_numbered(n, arcs.into_iter().enumerate().map(|(i, a)| (i + 1, a)))
    }

    fn from_numbered<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, (usize, usize))>,
    {
        let mut out = vec![Vec::new(); n];
        let mut lines = vec![Vec::new(); n];
        for (line, (a, b)) in arcs {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::OutOfRange { line, v, n });
                }
            }
            if a == b {
                return Err(GraphError::Loop { line, v: a });
            }
            out[a].push(b);
            lines[a].push((b, line));
        }
        let mut m = 0;
        for (a, list) in lines.iter_mut().enumerate() {
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(GraphError::Duplicate {
                        line: w[0].1.max(w[1].1),
                        u: a,
                        v: w[0].0,
                    });
                }
            }
            out[a].sort_unstable();
            m += out[a].len();
        }
        Ok(Self { n, out, m })
    }

    /// Both arcs for every edge.
    pub fn symmetric(g: &Graph) -> Self {
        let out = (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect();
        Self {
            n: g.n(),
            out,
            m: 2 * g.m(),
        }
    }

    pub fn from_digraph(d: &Digraph) -> Self {
        let mut out = vec![Vec::new(); d.n()];
        for (t, h) in d.arcs() {
            out[t].push(h);
        }
        for list in &mut out {
            list.sort_unstable();
        }
        Self {
            n: d.n(),
            out,
            m: d.m(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, GraphError> {
    tok.parse().map_err(|_| GraphError::Parse {
        line,
        msg: format!("expected {what}, found {tok:?}"),
    })
}

/// Pairs tagged with their 1-based line number.
type NumberedPairs = Vec<(usize, (usize, usize))>;

/// Parses "n m" followed by `m` pairs, one per line. Returns `n` and the
/// numbered pairs.
fn parse_pairs(text: &str) -> Result<(usize, NumberedPairs), GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header \"n m\"".into(),
    })?;
    let toks: Vec<_> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(GraphError::Parse {
            line: hline,
            msg: "header must be \"n m\"".into(),
        });
    }
    let n = parse_usize(toks[0], hline, "vertex count")?;
    let m = parse_usize(toks[1], hline, "edge count")?;
    let mut pairs = Vec::with_capacity(m);
    for (line, l) in lines {
        let toks: Vec<_> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(GraphError::Parse {
                line,
                msg: "expected two vertex ids".into(),
            });
        }
        let u = parse_usize(toks[0], line, "vertex id")?;
        let v = parse_usize(toks[1], line, "vertex id")?;
        pairs.push((line, (u, v)));
    }
    if pairs.len() != m {
        return Err(GraphError::Parse {
            line: hline,
            msg: format!("header announces {m} edges, found {}", pairs.len()),
        });
    }
    Ok((n, pairs))
}

/// Reads the edge-list format: header "n m", then `m` lines "u v".
pub fn read_graph(text: &str) -> Result<Graph, GraphError> {
    let (n, pairs) = parse_pairs(text)?;
    Graph::from_numbered(n, pairs)
}

/// Writes the canonical edge-list form.
pub fn write_graph(g: &Graph) -> String {
    let mut s = String::with_capacity(8 * (g.m() + 1));
    writeln!(s, "{} {}", g.n(), g.m()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

/// Reads "n m" then `m` arcs "u v" meaning `u -> v`.
pub fn read_arcs(text: &str) -> Result<ArcSet, GraphError> {
    let (n, pairs) = parse_pairs(text)?;
    ArcSet::from_numbered(n, pairs)
}

/// Writes an orientation as "n m" then one "tail head" line per edge, in edge order.
pub fn write_digraph(d: &Digraph) -> String {
    let mut s = String::with_capacity(8 * (d.m() + 1));
    writeln!(s, "{} {}", d.n(), d.m()).unwrap();
    for (t, h) in d.arcs() {
        writeln!(s, "{t} {h}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> Graph {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, pairs).unwrap()
    }

    #[test]
    fn induced_counts() {
        let g = k(4);
        assert_eq!(induced_edge_count(&g, &[0, 1, 2, 3]).unwrap(), 6);
        assert_eq!(induced_edge_count(&g, &[]).unwrap(), 0);
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(induced_edge_count(&path, &[0, 2]).unwrap(), 0);
        assert_eq!(
            induced_edge_count(&path, &[0, 7]),
            Err(GraphError::VertexOutOfRange { v: 7, n: 3 })
        );
    }

    #[test]
    fn back_neighbor_examples() {
        let star = Graph::new(5, [(0, 4), (1, 4), (2, 4), (3, 4)]).unwrap();
        let order = VertexOrdering::identity(5);
        assert_eq!(back_neighbors(&star, &order, 4).unwrap(), vec![0, 1, 2, 3]);
        assert!(back_neighbors(&star, &order, 0).unwrap().is_empty());
        let tri = k(3);
        assert_eq!(back_neighbors(&tri, &order_of(&[0, 1, 2]), 2).unwrap(), vec![0, 1]);
        assert!(back_neighbors(&tri, &order_of(&[2, 1, 0]), 2).unwrap().is_empty());
    }

    fn order_of(p: &[usize]) -> VertexOrdering {
        VertexOrdering::new(p.to_vec()).unwrap()
    }

    #[test]
    fn bad_ordering_rejected() {
        assert!(VertexOrdering::new(vec![0, 0, 1]).is_err());
        assert!(VertexOrdering::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn read_triangle_and_errors() {
        let g = read_graph("3 3\n0 1\n0 2\n1 2").unwrap();
        assert_eq!(g, k(3));
        assert_eq!(read_graph("2 1\n1 1"), Err(GraphError::Loop { line: 2, v: 1 }));
        assert_eq!(
            read_graph("3 2\n0 1\n1 0\n"),
            Err(GraphError::Duplicate { line: 3, u: 0, v: 1 })
        );
        assert_eq!(
            read_graph("3 1\n0 3\n"),
            Err(GraphError::OutOfRange { line: 2, v: 3, n: 3 })
        );
        assert!(matches!(read_graph("3 1\n0 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(read_graph("3 2\n0 1\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(read_graph(""), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn write_is_canonical() {
        let g = read_graph("4 3\n3 2\n1 0\n0 3\n").unwrap();
        assert_eq!(write_graph(&g), "4 3\n0 1\n0 3\n2 3\n");
    }

    #[test]
    fn digraph_degrees_and_reverse() {
        let g = k(3);
        let d = Digraph::from_heads(g, &[1, 0, 2]);
        assert_eq!(d.arc(0), (0, 1));
        assert_eq!(d.arc(1), (2, 0));
        assert_eq!(d.arc(2), (1, 2));
        assert_eq!(d.in_degrees(), vec![1, 1, 1]);
        let r = d.reversed();
        assert_eq!(r.arc(0), (1, 0));
        assert_eq!(d.out_neighbors(0), vec![1]);
        assert_eq!(d.in_neighbors(0), vec![2]);
        assert_eq!(write_digraph(&d), "3 3\n0 1\n2 0\n1 2\n");
        let arcs = read_arcs(&write_digraph(&d)).unwrap();
        assert_eq!(arcs, ArcSet::from_digraph(&d));
    }

    #[test]
    fn arcset_allows_antiparallel_but_not_duplicates() {
        assert!(ArcSet::new(2, [(0, 1), (1, 0)]).is_ok());
        assert!(matches!(
            ArcSet::new(2, [(0, 1), (0, 1)]),
            Err(GraphError::Duplicate { line: 2, .. })
        ));
    }

    #[test]
    fn edge_subgraph_keeps_relative_order() {
        let g = k(4);
        let s = g.edge_subgraph(&[5, 0, 3]).unwrap();
        assert_eq!(s.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert!(g.edge_subgraph(&[6]).is_err());
    }
}
