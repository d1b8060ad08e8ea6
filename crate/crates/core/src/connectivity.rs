//! Exact vertex connectivity of graphs and digraphs by unit-capacity flows.
//!
//! Local connectivity uses the usual vertex split: every vertex `w` becomes
//! `w_in -> w_out` with capacity one, and every arc `a -> b` becomes an
//! uncapacitated `a_out -> b_in`, so minimum cuts consist of vertex arcs.
//! Global k-connectivity only needs pairs with one end in a fixed set of
//! `k + 1` vertices: any separator `S` with `|S| < k` misses two of them,
//! and one of those is cut off from some vertex on the other side.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::flow::{FlowNetwork, INF};
use crate::graph::{ArcSet, Digraph, Graph};

/// Largest instance accepted by [`brute_force_connectivity`].
pub const BRUTE_FORCE_MAX_N: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConnectivityError {
    #[error("{u} and {v} are adjacent; no vertex separator exists")]
    Adjacent { u: usize, v: usize },
    #[error("pair must consist of two distinct vertices")]
    SameVertex,
    #[error("vertex {v} out of range for n = {n}")]
    OutOfRange { v: usize, n: usize },
    #[error("brute force is limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutKind {
    Graph,
    Digraph,
}

/// A set of vertices whose removal destroys every `u -> v` path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutCertificate {
    pub kind: CutKind,
    pub separator: Vec<usize>,
    pub pair: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairConnectivity {
    /// Number of internally disjoint `u -> v` paths.
    pub value: usize,
    /// A minimum `u, v` separator; its size equals `value`.
    pub separator: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityVerdict {
    pub k: usize,
    pub connected: bool,
    /// Present when some separator of size `< k` exists.
    pub certificate: Option<CutCertificate>,
}

/// Anything that can be viewed as a set of arcs.
pub trait AsNetwork {
    fn arc_set(&self) -> Cow<'_, ArcSet>;
    fn kind(&self) -> CutKind;
}

impl AsNetwork for Graph {
    fn arc_set(&self) -> Cow<'_, ArcSet> {
        Cow::Owned(ArcSet::symmetric(self))
    }
    fn kind(&self) -> CutKind {
        CutKind::Graph
    }
}

impl AsNetwork for Digraph {
    fn arc_set(&self) -> Cow<'_, ArcSet> {
        Cow::Owned(ArcSet::from_digraph(self))
    }
    fn kind(&self) -> CutKind {
        CutKind::Digraph
    }
}

impl AsNetwork for ArcSet {
    fn arc_set(&self) -> Cow<'_, ArcSet> {
        Cow::Borrowed(self)
    }
    fn kind(&self) -> CutKind {
        CutKind::Digraph
    }
}

/// Maximum number of internally disjoint `s -> t` paths, capped at `limit`,
/// and the residual separator (exact only when the cap was not reached).
fn local_flow(arcs: &ArcSet, s: usize, t: usize, limit: u64) -> PairConnectivity {
    let n = arcs.n();
    let mut net = FlowNetwork::new(2 * n);
    for w in 0..n {
        let cap = if w == s || w == t { INF } else { 1 };
        net.add_arc(2 * w, 2 * w + 1, cap);
    }
    for (a, b) in arcs.arcs() {
        net.add_arc(2 * a + 1, 2 * b, INF);
    }
    let value = net.max_flow(2 * s + 1, 2 * t, limit) as usize;
    let reach = net.residual_reachable(2 * s + 1);
    let separator = (0..n)
        .filter(|&w| w != s && w != t && reach[2 * w] && !reach[2 * w + 1])
        .collect();
    PairConnectivity { value, separator }
}

fn check_pair(arcs: &ArcSet, u: usize, v: usize) -> Result<(), ConnectivityError> {
    let n = arcs.n();
    for x in [u, v] {
        if x >= n {
            return Err(ConnectivityError::OutOfRange { v: x, n });
        }
    }
    if u == v {
        return Err(ConnectivityError::SameVertex);
    }
    if arcs.has_arc(u, v) {
        return Err(ConnectivityError::Adjacent { u, v });
    }
    Ok(())
}

/// Local vertex connectivity from `u` to `v` with a minimum separator.
pub fn vertex_connectivity_pair<H: AsNetwork + ?Sized>(
    h: &H,
    u: usize,
    v: usize,
) -> Result<PairConnectivity, ConnectivityError> {
    let arcs = h.arc_set();
    check_pair(&arcs, u, v)?;
    Ok(local_flow(&arcs, u, v, u64::MAX))
}

/// Whether removing `separator` leaves no directed `u -> v` path.
pub fn separates<H: AsNetwork + ?Sized>(h: &H, separator: &[usize], u: usize, v: usize) -> bool {
    let arcs = h.arc_set();
    let mut removed = vec![false; arcs.n()];
    for &s in separator {
        removed[s] = true;
    }
    if removed[u] || removed[v] {
        return false;
    }
    let mut seen = removed;
    seen[u] = true;
    let mut stack = vec![u];
    while let Some(a) = stack.pop() {
        for &b in arcs.out_neighbors(a) {
            if !seen[b] {
                if b == v {
                    return false;
                }
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    true
}

/// Exact k-connectivity decision. Needs at least `k + 1` vertices; a failing
/// instance with enough vertices carries a separator of size `< k`.
pub fn is_k_connected<H: AsNetwork + ?Sized>(h: &H, k: usize) -> ConnectivityVerdict {
    let arcs = h.arc_set();
    let kind = h.kind();
    let n = arcs.n();
    if n < k + 1 {
        return ConnectivityVerdict {
            k,
            connected: false,
            certificate: None,
        };
    }
    let anchors = k + 1;
    let mut tasks = Vec::new();
    for u in 0..anchors {
        for v in 0..n {
            if v == u {
                continue;
            }
            match kind {
                CutKind::Graph => {
                    // unordered pairs; skip the mirror of an anchor pair
                    if v < anchors && v < u {
                        continue;
                    }
                    if !arcs.has_arc(u, v) {
                        tasks.push((u, v));
                    }
                }
                CutKind::Digraph => {
                    if !arcs.has_arc(u, v) {
                        tasks.push((u, v));
                    }
                    if v >= anchors && !arcs.has_arc(v, u) {
                        tasks.push((v, u));
                    }
                }
            }
        }
    }
    let arcs_ref: &ArcSet = &arcs;
    let certificate = tasks.par_iter().find_map_first(|&(s, t)| {
        let pc = local_flow(arcs_ref, s, t, k as u64);
        (pc.value < k).then_some(CutCertificate {
            kind,
            separator: pc.separator,
            pair: (s, t),
        })
    });
    ConnectivityVerdict {
        k,
        connected: certificate.is_none(),
        certificate,
    }
}

fn strongly_connected_without(arcs: &ArcSet, inn: &[Vec<usize>], removed: &[bool]) -> bool {
    let n = arcs.n();
    let Some(root) = (0..n).find(|&v| !removed[v]) else {
        return true;
    };
    let alive = removed.iter().filter(|&&r| !r).count();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        let mut count = 1;
        while let Some(a) = stack.pop() {
            let next: &[usize] = if forward { arcs.out_neighbors(a) } else { &inn[a] };
            for &b in next {
                if !removed[b] && !seen[b] {
                    seen[b] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        count
    };
    reach(true) == alive && reach(false) == alive
}

/// A separator of size `< k` found by enumerating vertex subsets, if any.
/// `Ok(None)` means no such set exists and `n >= k + 1`.
pub fn brute_force_separator<H: AsNetwork + ?Sized>(
    h: &H,
    k: usize,
) -> Result<Option<Vec<usize>>, ConnectivityError> {
    let arcs = h.arc_set();
    let n = arcs.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(ConnectivityError::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let mut inn = vec![Vec::new(); n];
    for (a, b) in arcs.arcs() {
        inn[b].push(a);
    }
    let mut masks: Vec<u32> = (0u32..1 << n)
        .filter(|m| (m.count_ones() as usize) < k)
        .collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let removed: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        if !strongly_connected_without(&arcs, &inn, &removed) {
            return Ok(Some((0..n).filter(|&v| removed[v]).collect()));
        }
    }
    Ok(None)
}

/// Definitional check: `n >= k + 1` and every removal of `< k` vertices
/// leaves a strongly connected remainder.
pub fn brute_force_connectivity<H: AsNetwork + ?Sized>(
    h: &H,
    k: usize,
) -> Result<bool, ConnectivityError> {
    let n = h.arc_set().n();
    let sep = brute_force_separator(h, k)?;
    Ok(n > k && sep.is_none())
}
