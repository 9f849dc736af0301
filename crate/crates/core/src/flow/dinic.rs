//! Dinic max-flow over real capacities.
//!
//! Arcs are stored in insertion order and explored in that order, so the
//! resulting flow is reproducible for identical inputs.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Residual capacities at or below this are treated as saturated.
const RESIDUAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
    flow: f64,
}

impl Arc {
    fn residual(&self) -> f64 {
        self.cap - self.flow
    }
}

/// Flow network with paired forward/backward arcs.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i64>,
    cursor: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
            level: vec![-1; nodes],
            cursor: vec![0; nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    /// Adds a directed arc `from → to`; returns its id. Capacity may be
    /// `f64::INFINITY`.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, flow: 0.0 });
        self.arcs.push(Arc {
            to: from,
            cap: 0.0,
            flow: 0.0,
        });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    /// Flow currently routed on arc `id`.
    pub fn flow(&self, id: usize) -> f64 {
        self.arcs[id].flow
    }

    fn bfs(&mut self, source: usize, sink: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[source] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.residual() > RESIDUAL_EPS && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[sink] >= 0
    }

    fn dfs(&mut self, u: usize, sink: usize, limit: f64) -> f64 {
        if u == sink {
            return limit;
        }
        while self.cursor[u] < self.out[u].len() {
            let a = self.out[u][self.cursor[u]];
            let (to, residual) = (self.arcs[a].to, self.arcs[a].residual());
            if residual > RESIDUAL_EPS && self.level[to] == self.level[u] + 1 {
                let pushed = self.dfs(to, sink, limit.min(residual));
                if pushed > 0.0 {
                    self.arcs[a].flow += pushed;
                    self.arcs[a ^ 1].flow -= pushed;
                    return pushed;
                }
            }
            self.cursor[u] += 1;
        }
        0.0
    }

    /// Maximum `source → sink` flow value. May be called again after adding
    /// arcs; flow already routed is kept.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> f64 {
        let mut total = 0.0;
        while self.bfs(source, sink) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.dfs(source, sink, f64::INFINITY);
                if pushed <= 0.0 || pushed.is_infinite() {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from `source` in the residual network (the source side
    /// of a minimum cut once `max_flow` has run).
    pub fn source_side(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(u) = stack.pop() {
            for &a in &self.out[u] {
                let arc = &self.arcs[a];
                if arc.residual() > RESIDUAL_EPS && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_integer_network() {
        let mut net = FlowNetwork::new(6);
        net.add_arc(0, 1, 10.0);
        net.add_arc(0, 2, 10.0);
        net.add_arc(1, 3, 4.0);
        net.add_arc(1, 4, 8.0);
        net.add_arc(2, 4, 9.0);
        net.add_arc(3, 5, 10.0);
        net.add_arc(4, 3, 6.0);
        net.add_arc(4, 5, 10.0);
        assert_eq!(net.max_flow(0, 5), 19.0);
    }

    #[test]
    fn fractional_capacities_and_cut() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 0.5);
        net.add_arc(0, 2, 0.25);
        net.add_arc(1, 3, 1.0 / 3.0);
        net.add_arc(2, 3, 1.0);
        let f = net.max_flow(0, 3);
        assert!((f - (1.0 / 3.0 + 0.25)).abs() < 1e-12);
        let side = net.source_side(0);
        assert_eq!(side, vec![true, true, false, false]);
    }

    #[test]
    fn infinite_arcs_are_bounded_by_finite_ones() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 2.0);
        net.add_arc(1, 2, f64::INFINITY);
        assert_eq!(net.max_flow(0, 2), 2.0);
    }

    #[test]
    fn disconnected_sink() {
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 2.0);
        assert_eq!(net.max_flow(0, 2), 0.0);
    }
}
