//! Small augmenting-path flow routines used for cut checks and the
//! arc-disjoint path baseline.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: u64,
    cost: i64,
}

/// Residual network; edge `2i` is the forward edge of the `i`-th added edge
/// and `2i + 1` its reverse.
#[derive(Clone, Debug)]
pub(crate) struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: u64) -> usize {
        self.add_edge_with_cost(from, to, cap, 0)
    }

    pub fn add_edge_with_cost(&mut self, from: usize, to: usize, cap: u64, cost: i64) -> usize {
        let idx = self.edges.len() / 2;
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, cost });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
        });
        idx
    }

    /// Edmonds-Karp, stopping as soon as `limit` units are routed.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        let mut flow = 0;
        let n = self.adj.len();
        let mut pred = vec![usize::MAX; n];
        while flow < limit {
            pred.fill(usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; n];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.edges[e].to;
                    if !seen[v] && self.edges[e].cap > 0 {
                        seen[v] = true;
                        pred[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let e = pred[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = pred[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
        }
        flow
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if !seen[v] && self.edges[e].cap > 0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Successive shortest paths (Bellman-Ford, so negative residual costs are
    /// fine). Returns the total cost of routing exactly `units`, or `None`
    /// when the network cannot carry that much.
    pub fn min_cost_flow(&mut self, s: usize, t: usize, units: u64) -> Option<i64> {
        let n = self.adj.len();
        let mut total = 0i64;
        let mut routed = 0;
        while routed < units {
            let mut dist = vec![i64::MAX; n];
            let mut pred = vec![usize::MAX; n];
            dist[s] = 0;
            for _ in 0..n {
                let mut changed = false;
                for u in 0..n {
                    if dist[u] == i64::MAX {
                        continue;
                    }
                    for &e in &self.adj[u] {
                        let edge = &self.edges[e];
                        if edge.cap > 0 && dist[u] + edge.cost < dist[edge.to] {
                            dist[edge.to] = dist[u] + edge.cost;
                            pred[edge.to] = e;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if dist[t] == i64::MAX {
                return None;
            }
            let mut push = units - routed;
            let mut v = t;
            while v != s {
                let e = pred[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = pred[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            routed += push;
            total += push as i64 * dist[t];
        }
        Some(total)
    }
}
