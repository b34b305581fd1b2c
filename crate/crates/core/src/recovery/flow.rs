//! Integral min-cost flow by successive shortest paths with node potentials.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    cost: i128,
}

#[derive(Clone, Debug, Default)]
pub struct MinCostFlow {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        MinCostFlow {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds an arc and its residual twin; returns the arc id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i128) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost });
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently on arc `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.arcs[id + 1].cap
    }

    /// Sends up to `limit` units from `s` to `t` at minimum cost. The
    /// network must not contain negative cycles. Returns `(flow, cost)`.
    pub fn run(&mut self, s: usize, t: usize, limit: i64) -> (i64, i128) {
        let n = self.adj.len();
        let mut potential = self.bellman_ford(s);
        let mut flow = 0i64;
        let mut cost = 0i128;
        while flow < limit {
            // Dijkstra on reduced costs.
            let inf = i128::MAX;
            let mut dist = vec![inf; n];
            let mut via = vec![usize::MAX; n];
            dist[s] = 0;
            let mut heap = BinaryHeap::from([Reverse((0i128, s))]);
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &id in &self.adj[u] {
                    let arc = &self.arcs[id];
                    if arc.cap <= 0 || potential[arc.to] == inf {
                        continue;
                    }
                    let nd = d + arc.cost + potential[u] - potential[arc.to];
                    debug_assert!(arc.cost + potential[u] - potential[arc.to] >= 0);
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        via[arc.to] = id;
                        heap.push(Reverse((nd, arc.to)));
                    }
                }
            }
            if dist[t] == inf {
                break;
            }
            for v in 0..n {
                if dist[v] != inf {
                    potential[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let id = via[v];
                push = push.min(self.arcs[id].cap);
                v = self.arcs[id ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let id = via[v];
                self.arcs[id].cap -= push;
                self.arcs[id ^ 1].cap += push;
                cost += push as i128 * self.arcs[id].cost;
                v = self.arcs[id ^ 1].to;
            }
            flow += push;
        }
        (flow, cost)
    }

    fn bellman_ford(&self, s: usize) -> Vec<i128> {
        let n = self.adj.len();
        let inf = i128::MAX;
        let mut dist = vec![inf; n];
        dist[s] = 0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == inf {
                    continue;
                }
                for &id in &self.adj[u] {
                    let arc = &self.arcs[id];
                    if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[u] + arc.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }
}
