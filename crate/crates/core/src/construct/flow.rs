//! Integral maximum flow (Dinic) and feasible flows with edge lower bounds.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
}

/// A residual network. Arcs are stored in pairs: arc `2e` is forward, arc
/// `2e + 1` its reverse.
#[derive(Clone, Debug)]
pub(crate) struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    original: Vec<i64>,
}

impl Network {
    pub(crate) fn new(nodes: usize) -> Self {
        Network {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            original: Vec::new(),
        }
    }

    pub(crate) fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.original.len();
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
        self.original.push(cap);
        id
    }

    pub(crate) fn flow(&self, edge: usize) -> i64 {
        self.original[edge] - self.arcs[2 * edge].cap
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<u32>> {
        let mut level = vec![u32::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && level[arc.to] == u32::MAX {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        (level[t] != u32::MAX).then_some(level)
    }

    fn augment(&mut self, u: usize, t: usize, limit: i64, level: &[u32], next: &mut [usize]) -> i64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.augment(to, t, limit.min(cap), level, next);
                if pushed > 0 {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.augment(s, t, i64::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }
}

/// A network whose edges carry `[lower, upper]` bounds; solved for a
/// feasible `s`-`t` flow by the usual super-source reduction.
#[derive(Clone, Debug)]
pub(crate) struct BoundedNetwork {
    net: Network,
    lower: Vec<i64>,
    excess: Vec<i64>,
}

impl BoundedNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        BoundedNetwork {
            net: Network::new(nodes),
            lower: Vec::new(),
            excess: vec![0; nodes],
        }
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, lower: i64, upper: i64) -> usize {
        debug_assert!(0 <= lower && lower <= upper);
        self.excess[from] -= lower;
        self.excess[to] += lower;
        self.lower.push(lower);
        self.net.add_edge(from, to, upper - lower)
    }

    /// Per-edge flows of some feasible `s`-`t` flow, or `None`.
    pub(crate) fn feasible(mut self, s: usize, t: usize) -> Option<Vec<i64>> {
        let edges = self.lower.len();
        self.net.add_edge(t, s, i64::MAX / 4);
        let src = self.net.add_node();
        let sink = self.net.add_node();
        let mut demand = 0;
        for (v, &e) in self.excess.iter().enumerate() {
            if e > 0 {
                self.net.add_edge(src, v, e);
                demand += e;
            } else if e < 0 {
                self.net.add_edge(v, sink, -e);
            }
        }
        if self.net.max_flow(src, sink) != demand {
            return None;
        }
        Some((0..edges).map(|e| self.lower[e] + self.net.flow(e)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_max_flow() {
        let mut g = Network::new(4);
        g.add_edge(0, 1, 3);
        g.add_edge(0, 2, 2);
        g.add_edge(1, 2, 1);
        g.add_edge(1, 3, 2);
        g.add_edge(2, 3, 3);
        assert_eq!(g.max_flow(0, 3), 5);
    }

    #[test]
    fn lower_bounds_force_flow() {
        let mut g = BoundedNetwork::new(3);
        let a = g.add_edge(0, 1, 2, 2);
        let b = g.add_edge(1, 2, 0, 5);
        let flows = g.feasible(0, 2).unwrap();
        assert_eq!((flows[a], flows[b]), (2, 2));

        let mut bad = BoundedNetwork::new(3);
        bad.add_edge(0, 1, 3, 3);
        bad.add_edge(1, 2, 0, 2);
        assert!(bad.feasible(0, 2).is_none());
    }
}
