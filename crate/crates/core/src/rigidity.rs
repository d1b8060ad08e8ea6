//! Generic rigidity matroids over the prime field, plus exact combinatorial
//! oracles for dimensions one and two.
//!
//! A realization places every vertex at uniformly random coordinates in
//! `F_p`. The row matroid of the resulting rigidity matrix equals the generic
//! rigidity matroid unless some nonzero minor vanishes at the sampled point,
//! which happens with probability at most `rows / p`. Errors are one-sided:
//! a sampled realization can only under-report rank, so an "independent"
//! answer is always correct and a "dependent" answer may be wrong.

use std::num::NonZeroUsize;

use lru::LruCache;
use parking_lot::Mutex;
use petgraph::unionfind::UnionFind;
use rand::Rng;
use thiserror::Error;

use crate::ff::{DenseMatrix, EchelonBasis, Fp, Reduction, MODULUS};
use crate::graph::{EdgeId, Graph};
use crate::matroid::{Exchange, IndependenceOracle};
use crate::stream::SeededStream;

const CACHE_CAPACITY: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RigidityError {
    #[error("realization has {got} vertices, graph has {n}")]
    DimensionMismatch { got: usize, n: usize },
    #[error("linkedness needs two distinct vertices, got {0} twice")]
    SameVertex(usize),
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

pub fn binom2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

/// Rank of the rigidity matroid of the complete graph on `n` vertices:
/// `C(n, 2)` when `n <= d + 1`, otherwise `d n - C(d + 1, 2)`.
pub fn complete_rank(n: usize, d: usize) -> usize {
    if n <= d + 1 {
        binom2(n)
    } else {
        d * n - binom2(d + 1)
    }
}

/// Coordinates of every vertex in `F_p^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    d: usize,
    n: usize,
    coords: Vec<Fp>,
    seed: u64,
    stream: u64,
}

impl Realization {
    pub fn random(n: usize, d: usize, seed: u64, stream: u64) -> Self {
        let mut rng = SeededStream::new(seed, stream);
        let coords = (0..n * d)
            .map(|_| Fp::new(rng.random_range(0..MODULUS)))
            .collect();
        Self {
            d,
            n,
            coords,
            seed,
            stream,
        }
    }

    pub fn from_coords(d: usize, coords: Vec<Fp>) -> Self {
        assert!(d > 0 && coords.len().is_multiple_of(d));
        Self {
            d,
            n: coords.len() / d,
            coords,
            seed: 0,
            stream: 0,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn point(&self, v: usize) -> &[Fp] {
        &self.coords[v * self.d..(v + 1) * self.d]
    }

    /// Rigidity-matrix row of the pair `{u, v}`.
    pub fn pair_row(&self, u: usize, v: usize) -> Vec<Fp> {
        let d = self.d;
        let mut row = vec![Fp::ZERO; d * self.n];
        for k in 0..d {
            let diff = self.coords[u * d + k] - self.coords[v * d + k];
            row[u * d + k] = diff;
            row[v * d + k] = -diff;
        }
        row
    }
}

/// One row per edge in edge order, `d n` columns.
pub fn rigidity_matrix(g: &Graph, real: &Realization) -> Result<DenseMatrix, RigidityError> {
    if real.n() != g.n() {
        return Err(RigidityError::DimensionMismatch {
            got: real.n(),
            n: g.n(),
        });
    }
    let mut m = DenseMatrix::zeros(g.m(), real.d() * g.n());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        m.row_mut(e).copy_from_slice(&real.pair_row(u, v));
    }
    Ok(m)
}

/// Randomized rank oracle for `R_d` on the edges of one host graph.
pub struct RigidityOracle<'g> {
    graph: &'g Graph,
    real: Realization,
    cache: Mutex<LruCache<Vec<u32>, usize>>,
}

impl<'g> RigidityOracle<'g> {
    pub fn new(graph: &'g Graph, d: usize, seed: u64, stream: u64) -> Result<Self, RigidityError> {
        if d == 0 {
            return Err(RigidityError::ZeroDimension);
        }
        Ok(Self::with_realization(
            graph,
            Realization::random(graph.n(), d, seed, stream),
        ))
    }

    pub fn with_realization(graph: &'g Graph, real: Realization) -> Self {
        assert_eq!(graph.n(), real.n(), "realization must cover the graph");
        Self {
            graph,
            real,
            cache: Mutex::new(LruCache::new(NonZeroUsize::new(CACHE_CAPACITY).unwrap())),
        }
    }

    /// Same graph and dimension under a fresh realization.
    pub fn reseeded(&self, seed: u64, stream: u64) -> Self {
        Self::with_realization(
            self.graph,
            Realization::random(self.graph.n(), self.real.d(), seed, stream),
        )
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn d(&self) -> usize {
        self.real.d()
    }

    pub fn realization(&self) -> &Realization {
        &self.real
    }

    fn cols(&self) -> usize {
        self.real.d() * self.graph.n()
    }

    fn edge_row(&self, e: EdgeId) -> Vec<Fp> {
        let (u, v) = self.graph.edge(e);
        self.real.pair_row(u, v)
    }

    fn key(set: &[EdgeId]) -> Vec<u32> {
        let mut k: Vec<u32> = set.iter().map(|&e| e as u32).collect();
        k.sort_unstable();
        k.dedup();
        k
    }

    /// Rank of the rows of `set`, memoized.
    pub fn rank_d(&self, set: &[EdgeId]) -> usize {
        let key = Self::key(set);
        if let Some(&r) = self.cache.lock().get(&key) {
            return r;
        }
        let mut basis = EchelonBasis::new(self.cols());
        for &e in &key {
            basis.insert(&self.edge_row(e as usize));
        }
        let r = basis.rank();
        self.cache.lock().put(key, r);
        r
    }

    /// Reference path: one full elimination of the selected rows.
    pub fn rank_d_full(&self, set: &[EdgeId]) -> usize {
        let key = Self::key(set);
        let rows: Vec<Vec<Fp>> = key.iter().map(|&e| self.edge_row(e as usize)).collect();
        DenseMatrix::from_rows(self.cols(), &rows)
            .expect("rows have d n columns")
            .rank()
    }

    pub fn is_independent(&self, set: &[EdgeId]) -> bool {
        let key = Self::key(set);
        if key.len() != set.len() {
            return false;
        }
        let mut basis = EchelonBasis::new(self.cols());
        key.iter().all(|&e| basis.insert(&self.edge_row(e as usize)))
    }

    /// Whether the whole host graph is d-rigid.
    pub fn is_d_rigid(&self) -> bool {
        self.spans(&self.graph.all_edge_ids())
    }

    /// Whether `set` spans `R_d` of the complete graph on the host vertices.
    pub fn spans(&self, set: &[EdgeId]) -> bool {
        self.rank_d(set) == complete_rank(self.graph.n(), self.d())
    }

    /// Whether adding the pair `{u, v}` to `set` leaves the rank unchanged.
    pub fn is_linked(&self, u: usize, v: usize, set: &[EdgeId]) -> Result<bool, RigidityError> {
        let n = self.graph.n();
        for x in [u, v] {
            if x >= n {
                return Err(RigidityError::VertexOutOfRange { v: x, n });
            }
        }
        if u == v {
            return Err(RigidityError::SameVertex(u));
        }
        let mut basis = EchelonBasis::new(self.cols());
        for e in Self::key(set) {
            basis.insert(&self.edge_row(e as usize));
        }
        Ok(!basis.insert(&self.real.pair_row(u, v)))
    }

    /// Greedy maximal independent subset of `set` in edge-id order.
    pub fn extract_base(&self, set: &[EdgeId]) -> Vec<EdgeId> {
        let mut basis = EchelonBasis::new(self.cols());
        Self::key(set)
            .into_iter()
            .map(|e| e as usize)
            .filter(|&e| basis.insert(&self.edge_row(e)))
            .collect()
    }

    /// Same result as [`extract_base`](Self::extract_base) by re-eliminating
    /// from scratch for every candidate edge.
    pub fn extract_base_reference(&self, set: &[EdgeId]) -> Vec<EdgeId> {
        let mut chosen: Vec<EdgeId> = Vec::new();
        for e in Self::key(set) {
            chosen.push(e as usize);
            if self.rank_d_full(&chosen) < chosen.len() {
                chosen.pop();
            }
        }
        chosen
    }
}

/// Fundamental-circuit structure for an independent edge set of a rigidity
/// oracle, via an echelon basis that tracks row combinations.
struct RigidityExchange<'a, 'g> {
    oracle: &'a RigidityOracle<'g>,
    members: Vec<EdgeId>,
    basis: EchelonBasis,
}

impl Exchange for RigidityExchange<'_, '_> {
    fn members(&self) -> &[EdgeId] {
        &self.members
    }

    fn circuit(&self, x: EdgeId) -> Option<Vec<EdgeId>> {
        match self.basis.classify(&self.oracle.edge_row(x)) {
            Reduction::Independent => None,
            Reduction::Dependent(coeffs) => {
                let coeffs = coeffs.expect("basis is tracked");
                let mut c: Vec<EdgeId> = self
                    .members
                    .iter()
                    .zip(coeffs)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&e, _)| e)
                    .collect();
                c.sort_unstable();
                Some(c)
            }
        }
    }

    fn try_insert(&mut self, x: EdgeId) -> bool {
        if self.basis.insert(&self.oracle.edge_row(x)) {
            self.members.push(x);
            true
        } else {
            false
        }
    }
}

impl IndependenceOracle for RigidityOracle<'_> {
    fn ground_size(&self) -> usize {
        self.graph.m()
    }

    fn rank(&self, set: &[EdgeId]) -> usize {
        self.rank_d(set)
    }

    fn is_independent(&self, set: &[EdgeId]) -> bool {
        RigidityOracle::is_independent(self, set)
    }

    fn exchange<'a>(&'a self, independent: &[EdgeId]) -> Option<Box<dyn Exchange + 'a>> {
        let mut ex = RigidityExchange {
            oracle: self,
            members: Vec::with_capacity(independent.len()),
            basis: EchelonBasis::tracked(self.cols()),
        };
        for &e in independent {
            if !ex.try_insert(e) {
                return None;
            }
        }
        Some(Box::new(ex))
    }

    fn label(&self) -> String {
        format!("R_{}", self.d())
    }
}

/// Exact independence in `R_1`: the edge set is a forest.
pub fn exact_oracle_d1(g: &Graph, set: &[EdgeId]) -> bool {
    let mut uf = UnionFind::<usize>::new(g.n());
    let mut seen = vec![false; g.m()];
    set.iter().all(|&e| {
        if std::mem::replace(&mut seen[e], true) {
            return false;
        }
        let (u, v) = g.edge(e);
        uf.union(u, v)
    })
}

/// Exact independence in `R_2` by the (2,3)-pebble game.
pub fn exact_oracle_d2(g: &Graph, set: &[EdgeId]) -> bool {
    let mut game = PebbleGame::new(g.n());
    let mut seen = vec![false; g.m()];
    set.iter().all(|&e| {
        if std::mem::replace(&mut seen[e], true) {
            return false;
        }
        let (u, v) = g.edge(e);
        game.try_add(u, v)
    })
}

/// The (2,3)-pebble game: each vertex starts with two pebbles, an edge is
/// accepted when its endpoints can jointly gather four pebbles, and every
/// accepted edge is covered by a pebble of its tail.
pub struct PebbleGame {
    pebbles: Vec<u8>,
    out: Vec<Vec<usize>>,
}

impl PebbleGame {
    pub fn new(n: usize) -> Self {
        Self {
            pebbles: vec![2; n],
            out: vec![Vec::new(); n],
        }
    }

    /// Moves a free pebble onto `root` along a directed path that avoids
    /// `blocked`. Returns false when no free pebble is reachable.
    fn fetch(&mut self, root: usize, blocked: usize) -> bool {
        let n = self.pebbles.len();
        let mut parent = vec![usize::MAX; n];
        parent[root] = root;
        parent[blocked] = blocked;
        let mut stack = vec![root];
        let mut found = None;
        'search: while let Some(a) = stack.pop() {
            for &b in &self.out[a] {
                if parent[b] != usize::MAX {
                    continue;
                }
                parent[b] = a;
                if self.pebbles[b] > 0 {
                    found = Some(b);
                    break 'search;
                }
                stack.push(b);
            }
        }
        let Some(mut w) = found else {
            return false;
        };
        self.pebbles[w] -= 1;
        while w != root {
            let a = parent[w];
            // reverse a -> w into w -> a
            let pos = self.out[a].iter().position(|&x| x == w).unwrap();
            self.out[a].swap_remove(pos);
            self.out[w].push(a);
            w = a;
        }
        self.pebbles[root] += 1;
        true
    }

    /// Tries to insert edge `uv`; returns whether it is independent of the
    /// edges accepted so far.
    pub fn try_add(&mut self, u: usize, v: usize) -> bool {
        while self.pebbles[u] < 2 {
            if !self.fetch(u, v) {
                return false;
            }
        }
        while self.pebbles[v] < 2 {
            if !self.fetch(v, u) {
                return false;
            }
        }
        self.pebbles[u] -= 1;
        self.out[u].push(v);
        true
    }
}
