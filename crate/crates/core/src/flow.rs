//! Dinic max-flow on small integer capacities.
//!
//! Phases build a BFS level graph and push a blocking flow along it. On unit
//! capacity networks this runs in `O(sqrt(V) E)`.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    level: Vec<u32>,
    cursor: Vec<usize>,
}

pub(crate) const INF: u32 = u32::MAX / 2;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            cursor: vec![0; nodes],
        }
    }

    /// Adds `from -> to` with the given capacity; returns the arc id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently carried by arc `id` (as returned by [`add_arc`]).
    pub fn flow(&self, id: usize) -> u32 {
        self.arcs[id ^ 1].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = u32::MAX);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(a) = q.pop_front() {
            for &id in &self.adj[a] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && self.level[arc.to] == u32::MAX {
                    self.level[arc.to] = self.level[a] + 1;
                    q.push_back(arc.to);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    fn dfs(&mut self, a: usize, t: usize, pushed: u32) -> u32 {
        if a == t {
            return pushed;
        }
        while self.cursor[a] < self.adj[a].len() {
            let id = self.adj[a][self.cursor[a]];
            let (to, cap) = (self.arcs[id].to, self.arcs[id].cap);
            if cap > 0 && self.level[to] == self.level[a] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0 {
                    self.arcs[id].cap -= got;
                    self.arcs[id ^ 1].cap += got;
                    return got;
                }
            }
            self.cursor[a] += 1;
        }
        0
    }

    /// Augments from `s` to `t` until the flow value reaches `limit` or no
    /// augmenting path is left. Returns the value added by this call.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        let mut total = 0u64;
        while total < limit && self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let want = (limit - total).min(INF as u64) as u32;
                let f = self.dfs(s, t, want);
                if f == 0 {
                    break;
                }
                total += f as u64;
                if total >= limit {
                    break;
                }
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for &id in &self.adj[a] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}
