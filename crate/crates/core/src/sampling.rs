//! Sampling sets and the strategies used to build them.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedGraph};
use crate::partition::{boundary, Partition};

/// Name of the generator behind [`uniform_random`] and the randomized checks.
pub const GENERATOR: &str = "splitmix64";

/// Non-empty set of sampled nodes, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SamplingSet(Vec<NodeId>);

impl SamplingSet {
    pub fn new(node_count: usize, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        if nodes.is_empty() {
            return Err(Error::EmptySamplingSet);
        }
        if let Some(&bad) = nodes.iter().find(|&&i| i >= node_count) {
            return Err(Error::InvalidNode(bad));
        }
        nodes.sort_unstable();
        nodes.dedup();
        Ok(SamplingSet(nodes))
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false for a constructed set; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.binary_search(&node).is_ok()
    }

    pub fn mask(&self, node_count: usize) -> Vec<bool> {
        let mut m = vec![false; node_count];
        for &i in &self.0 {
            m[i] = true;
        }
        m
    }
}

/// Which member of a cluster [`per_cluster`] picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PickRule {
    /// Lower median node index.
    Middle,
    LowestId,
}

impl PickRule {
    fn pick(self, members: &[NodeId]) -> NodeId {
        match self {
            PickRule::Middle => members[(members.len() - 1) / 2],
            PickRule::LowestId => members[0],
        }
    }
}

/// Exactly one node from each cluster.
pub fn per_cluster(part: &Partition, rule: PickRule) -> SamplingSet {
    let nodes = part.clusters().iter().map(|m| rule.pick(m)).collect();
    SamplingSet(nodes).normalized()
}

/// A set of the same size as [`per_cluster`] that contains no node of the
/// `skipped` clusters. Each remaining cluster contributes its `rule` pick;
/// the budget freed by the skipped clusters is filled with the lowest
/// unpicked node of the remaining clusters, in cluster order.
pub fn per_cluster_skipping(
    part: &Partition,
    rule: PickRule,
    skipped: &[usize],
) -> Result<SamplingSet> {
    let clusters = part.clusters();
    let keep: Vec<usize> = (0..clusters.len())
        .filter(|c| !skipped.contains(c))
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptySamplingSet);
    }
    let mut nodes: Vec<NodeId> = keep.iter().map(|&c| rule.pick(&clusters[c])).collect();
    let mut missing = clusters.len() - keep.len();
    'fill: while missing > 0 {
        let before = missing;
        for &c in &keep {
            if let Some(&extra) = clusters[c].iter().find(|i| !nodes.contains(i)) {
                nodes.push(extra);
                missing -= 1;
                if missing == 0 {
                    break 'fill;
                }
            }
        }
        if before == missing {
            return Err(Error::InvalidBudget {
                budget: clusters.len(),
                nodes: nodes.len(),
            });
        }
    }
    Ok(SamplingSet(nodes).normalized())
}

/// Endpoints of all boundary edges. `Ok(None)` when the boundary is empty,
/// as for a single-cluster partition.
pub fn boundary_adjacent(graph: &WeightedGraph, part: &Partition) -> Result<Option<SamplingSet>> {
    let bnd = boundary(graph, part)?;
    let nodes: Vec<NodeId> = bnd
        .indices()
        .iter()
        .flat_map(|&e| [graph.edge(e).head(), graph.edge(e).tail()])
        .collect();
    if nodes.is_empty() {
        return Ok(None);
    }
    Ok(Some(SamplingSet(nodes).normalized()))
}

/// `budget` distinct nodes drawn uniformly without replacement.
pub fn uniform_random(node_count: usize, budget: usize, seed: u64) -> Result<SamplingSet> {
    if budget == 0 || budget > node_count {
        return Err(Error::InvalidBudget {
            budget,
            nodes: node_count,
        });
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let nodes = index::sample(&mut rng, node_count, budget).into_vec();
    Ok(SamplingSet(nodes).normalized())
}

impl SamplingSet {
    fn normalized(mut self) -> Self {
        self.0.sort_unstable();
        self.0.dedup();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn construction_errors() {
        assert_eq!(
            SamplingSet::new(3, []).unwrap_err(),
            Error::EmptySamplingSet
        );
        assert_eq!(SamplingSet::new(3, [3]).unwrap_err(), Error::InvalidNode(3));
        let m = SamplingSet::new(5, [4, 1, 4]).unwrap();
        assert_eq!(m.nodes(), &[1, 4]);
        assert!(m.contains(4) && !m.contains(2));
    }

    #[test]
    fn per_cluster_rules() {
        let part = Partition::new(vec![0, 0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(per_cluster(&part, PickRule::Middle).nodes(), &[1, 5]);
        assert_eq!(per_cluster(&part, PickRule::LowestId).nodes(), &[0, 4]);
        assert_eq!(
            per_cluster(&Partition::single(4), PickRule::Middle).nodes(),
            &[1]
        );
        assert_eq!(
            per_cluster(&Partition::singletons(3), PickRule::Middle).nodes(),
            &[0, 1, 2]
        );
    }

    #[test]
    fn skipping_keeps_size() {
        let part = Partition::new(vec![0, 0, 1, 1, 2, 2]).unwrap();
        let m = per_cluster_skipping(&part, PickRule::LowestId, &[1]).unwrap();
        assert_eq!(m.nodes(), &[0, 1, 4]);
        assert!(per_cluster_skipping(&part, PickRule::LowestId, &[0, 1, 2]).is_err());
    }

    #[test]
    fn boundary_adjacent_sets() {
        let (g, _) = build_graph(&[(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap();
        assert_eq!(boundary_adjacent(&g, &Partition::single(4)).unwrap(), None);
        let part = Partition::new(vec![0, 0, 1, 1]).unwrap();
        assert_eq!(
            boundary_adjacent(&g, &part).unwrap().unwrap().nodes(),
            &[1, 2]
        );
    }

    #[test]
    fn uniform_random_is_deterministic() {
        assert_eq!(uniform_random(10, 10, 3).unwrap().len(), 10);
        let a = uniform_random(50, 1, 42).unwrap();
        let b = uniform_random(50, 1, 42).unwrap();
        assert_eq!(a, b);
        let c = uniform_random(2642, 300, 9).unwrap();
        assert_eq!(c.len(), 300);
        assert!(matches!(
            uniform_random(5, 0, 1),
            Err(Error::InvalidBudget { .. })
        ));
        assert!(matches!(
            uniform_random(5, 6, 1),
            Err(Error::InvalidBudget { .. })
        ));
    }
}
