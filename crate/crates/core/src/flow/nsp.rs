//! Randomized search for violations of the stable analysis nullspace
//! inequality `‖u‖_{E∖S} ≥ κ·‖u‖_S` over signals `u` vanishing on the
//! sampling set.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;

use crate::graph::{EdgeSet, GraphSignal, WeightedGraph};
use crate::partition::Partition;
use crate::sampling::SamplingSet;

const MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NspCheck {
    pub kappa: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NspReport {
    pub violations: Vec<GraphSignal>,
    pub checked: usize,
}

impl NspReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests `params.trials` Gaussian kernel signals plus deterministic
/// candidates: the indicator of every cluster of `clusters` (when given) and
/// of every connected component of `V ∖ M`, each zeroed on `M`.
///
/// A signal is a violation when `‖u‖_{E∖S} < κ·‖u‖_S − 1e-9`. An empty
/// report is evidence, not proof, that the inequality holds.
pub fn empirical_nsp_check(
    graph: &WeightedGraph,
    edges: &EdgeSet,
    samples: &SamplingSet,
    clusters: Option<&Partition>,
    params: NspCheck,
) -> NspReport {
    let n = graph.node_count();
    let in_s: Vec<bool> = (0..graph.edge_count()).map(|e| edges.contains(e)).collect();
    let sampled = samples.mask(n);

    let mut report = NspReport {
        violations: Vec::new(),
        checked: 0,
    };
    let mut test = |u: Vec<f64>| {
        let (mut on_s, mut off_s) = (0.0, 0.0);
        for (e, edge) in graph.edges().iter().enumerate() {
            let term = edge.weight() * (u[edge.head()] - u[edge.tail()]).abs();
            if in_s[e] {
                on_s += term;
            } else {
                off_s += term;
            }
        }
        report.checked += 1;
        if off_s < params.kappa * on_s - MARGIN {
            report.violations.push(GraphSignal::from_vec_unchecked(u));
        }
    };

    if let Some(part) = clusters.filter(|p| p.node_count() == n) {
        for members in part.clusters() {
            let mut u = vec![0.0; n];
            for i in members {
                if !sampled[i] {
                    u[i] = 1.0;
                }
            }
            test(u);
        }
    }
    for component in unsampled_components(graph, &sampled) {
        let mut u = vec![0.0; n];
        for i in component {
            u[i] = 1.0;
        }
        test(u);
    }

    let mut rng = SplitMix64::seed_from_u64(params.seed);
    for _ in 0..params.trials {
        let u = (0..n)
            .map(|i| {
                let z: f64 = StandardNormal.sample(&mut rng);
                if sampled[i] {
                    0.0
                } else {
                    z
                }
            })
            .collect();
        test(u);
    }
    report
}

fn unsampled_components(graph: &WeightedGraph, sampled: &[bool]) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let mut seen = sampled.to_vec();
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut component = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for inc in graph.incident(u) {
                let v = graph.edge(inc.edge).other(u);
                if !seen[v] {
                    seen[v] = true;
                    component.push(v);
                    stack.push(v);
                }
            }
        }
        component.sort_unstable();
        out.push(component);
    }
    out
}
