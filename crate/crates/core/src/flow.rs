//! Dinic max-flow on real capacities, used for the closure problem.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
}

/// A flow network. Arcs are stored in pairs: arc `2k` and its reverse `2k+1`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    eps: f64,
}

impl FlowNetwork {
    /// `eps` is the residual capacity treated as zero.
    pub fn new(nodes: usize, eps: f64) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            eps,
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0.0 });
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let lu = level[u].expect("queued nodes have a level");
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > self.eps && level[arc.to].is_none() {
                    level[arc.to] = Some(lu + 1);
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, limit: f64, level: &[Option<usize>], next: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > self.eps && level[to] == level[u].map(|l| l + 1) {
                let pushed = self.augment(to, t, limit.min(cap), level, next);
                if pushed > self.eps {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    /// Maximum flow value from `s` to `t`.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.augment(s, t, f64::INFINITY, &level, &mut next);
                if pushed <= self.eps {
                    break;
                }
                total += pushed;
            }
        }
    }

    /// Nodes reachable from `s` in the residual network: the smallest source
    /// side of a minimum cut once [`max_flow`](Self::max_flow) has run.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l.is_some()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network() {
        let mut g = FlowNetwork::new(4, 1e-12);
        g.add_arc(0, 1, 3.0);
        g.add_arc(0, 2, 2.0);
        g.add_arc(1, 2, 1.0);
        g.add_arc(1, 3, 2.0);
        g.add_arc(2, 3, 3.0);
        assert_eq!(g.max_flow(0, 3), 5.0);
        assert_eq!(g.source_side(0), vec![true, false, false, false]);
    }

    #[test]
    fn infinite_arcs() {
        let mut g = FlowNetwork::new(3, 1e-12);
        g.add_arc(0, 1, 4.0);
        g.add_arc(1, 2, f64::INFINITY);
        assert_eq!(g.max_flow(0, 2), 4.0);
        assert_eq!(g.source_side(0), vec![true, false, false]);
        let mut h = FlowNetwork::new(2, 1e-12);
        assert_eq!(h.max_flow(0, 1), 0.0);
    }
}
