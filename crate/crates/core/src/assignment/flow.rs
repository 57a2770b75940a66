//! Successive-shortest-path min-cost flow with integer costs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    rev: usize,
    cap: i64,
    cost: i128,
}

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    graph: Vec<Vec<Edge>>,
}

impl MinCostFlow {
    pub fn new(n: usize) -> Self {
        Self {
            graph: vec![Vec::new(); n],
        }
    }

    /// Add an arc; returns its handle `(from, index)`. Costs must be
    /// non-negative.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i128) -> (usize, usize) {
        debug_assert!(cost >= 0);
        let fwd = self.graph[from].len();
        let bwd = self.graph[to].len() + usize::from(from == to);
        self.graph[from].push(Edge { to, rev: bwd, cap, cost });
        self.graph[to].push(Edge {
            to: from,
            rev: fwd,
            cap: 0,
            cost: -cost,
        });
        (from, fwd)
    }

    pub fn flow_on(&self, handle: (usize, usize)) -> i64 {
        let e = &self.graph[handle.0][handle.1];
        self.graph[e.to][e.rev].cap
    }

    /// Push up to `limit` units from `s` to `t` at minimum cost. Returns
    /// (flow, cost).
    pub fn run(&mut self, s: usize, t: usize, limit: i64) -> (i64, i128) {
        let n = self.graph.len();
        let mut potential = vec![0i128; n];
        let mut flow = 0;
        let mut cost = 0;
        let mut dist = vec![i128::MAX; n];
        let mut prev: Vec<(usize, usize)> = vec![(usize::MAX, 0); n];
        while flow < limit {
            dist.fill(i128::MAX);
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i128, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for (i, e) in self.graph[u].iter().enumerate() {
                    if e.cap <= 0 {
                        continue;
                    }
                    let nd = d + e.cost + potential[u] - potential[e.to];
                    if nd < dist[e.to] {
                        dist[e.to] = nd;
                        prev[e.to] = (u, i);
                        heap.push(Reverse((nd, e.to)));
                    }
                }
            }
            if dist[t] == i128::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] != i128::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let (u, i) = prev[v];
                push = push.min(self.graph[u][i].cap);
                v = u;
            }
            let mut v = t;
            while v != s {
                let (u, i) = prev[v];
                let rev = self.graph[u][i].rev;
                self.graph[u][i].cap -= push;
                self.graph[v][rev].cap += push;
                cost += self.graph[u][i].cost * i128::from(push);
                v = u;
            }
            flow += push;
        }
        (flow, cost)
    }
}
