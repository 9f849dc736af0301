//! Benchmark instances: clustered chains and grids.
//!
//! Chain nodes carry original ids `1..=n` in chain order.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{GraphSignal, NodeIds, WeightedGraph};
use crate::partition::{clustered_signal, ClusterCoefficients, Partition};

/// A graph with a reference partition and the clustered signal on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: WeightedGraph,
    pub ids: NodeIds,
    pub partition: Partition,
    pub signal: GraphSignal,
}

/// Parameters of the clustered chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub nodes: usize,
    pub clusters: usize,
    pub w_in: f64,
    pub w_out: f64,
    /// Cycled over the clusters in order.
    pub coefficients: Vec<f64>,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            nodes: 100,
            clusters: 10,
            w_in: 4.0,
            w_out: 2.0,
            coefficients: alloc::vec![1.0, 5.0],
        }
    }
}

/// Chain `1 – 2 – … – n` cut into equal runs of consecutive nodes.
pub fn chain_graph_experiment(params: &ChainParams) -> Result<Instance> {
    let ChainParams {
        nodes,
        clusters,
        w_in,
        w_out,
        ..
    } = *params;
    if nodes < 2 || clusters == 0 {
        return Err(Error::InvalidSize("chain needs two nodes and one cluster"));
    }
    if params.coefficients.is_empty() {
        return Err(Error::InvalidSize("no cluster coefficients"));
    }
    if nodes % clusters != 0 {
        return Err(Error::IndivisibleClusterSize { nodes, clusters });
    }
    let size = nodes / clusters;
    let cluster_of: Vec<usize> = (0..nodes).map(|i| i / size).collect();
    let graph = WeightedGraph::new(
        nodes,
        (0..nodes - 1).map(|i| {
            let w = if cluster_of[i] == cluster_of[i + 1] {
                w_in
            } else {
                w_out
            };
            (i, i + 1, w)
        }),
    )?;
    let partition = Partition::new(cluster_of)?;
    let coeffs = ClusterCoefficients::new(
        (0..clusters)
            .map(|c| params.coefficients[c % params.coefficients.len()])
            .collect(),
    )?;
    let signal = clustered_signal(&graph, &partition, &coeffs)?;
    Ok(Instance {
        graph,
        ids: NodeIds::offset(nodes, 1),
        partition,
        signal,
    })
}

/// Chain of `n` nodes in two halves with unit weights inside each half and
/// weight `1/delta` on the edge joining them; the signal is 1 on the first
/// half and 2 on the second.
pub fn two_cluster_chain(n: usize, delta: f64) -> Result<Instance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidSize("two-cluster chain needs an even n >= 4"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidSize("delta must be positive"));
    }
    chain_graph_experiment(&ChainParams {
        nodes: n,
        clusters: 2,
        w_in: 1.0,
        w_out: 1.0 / delta,
        coefficients: alloc::vec![1.0, 2.0],
    })
}

/// `rows × cols` 4-neighbour grid with unit weights; node `(r, c)` has
/// original id `r·cols + c + 1`.
pub fn grid_graph(rows: usize, cols: usize) -> Result<(WeightedGraph, NodeIds)> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidSize("grid needs at least two nodes"));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1), 1.0));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c), 1.0));
            }
        }
    }
    let graph = WeightedGraph::new(rows * cols, edges)?;
    Ok((graph, NodeIds::offset(rows * cols, 1)))
}
