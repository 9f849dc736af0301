//! Oriented weighted graphs, graph signals and total variation.
//!
//! Every undirected edge `{i, j}` carries a fixed orientation: one endpoint is
//! the head `e⁺`, the other the tail `e⁻`. The orientation has no meaning for
//! the data; it only fixes the sign convention of edge differences and flows.
//! Differences are taken as `x[e⁺] − x[e⁻]` and are unweighted; weights enter
//! through the norms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};

/// Dense node index in `0..node_count`.
pub type NodeId = usize;

/// An undirected edge with a fixed orientation and a positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedEdge {
    head: NodeId,
    tail: NodeId,
    weight: f64,
}

impl OrientedEdge {
    pub fn head(&self) -> NodeId {
        self.head
    }

    pub fn tail(&self) -> NodeId {
        self.tail
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Incidence sign of `node` on this edge: `+1` at the head, `-1` at the tail.
    pub fn sign_at(&self, node: NodeId) -> Option<f64> {
        if node == self.head {
            Some(1.0)
        } else if node == self.tail {
            Some(-1.0)
        } else {
            None
        }
    }

    /// The endpoint opposite to `node`.
    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.head {
            self.tail
        } else {
            self.head
        }
    }
}

/// One entry of a node's signed adjacency index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub edge: usize,
    /// `+1.0` if the node is the head of `edge`, `-1.0` if it is the tail.
    pub sign: f64,
}

/// Mapping between dense node indices and the ids used in input files.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeIds {
    original: Vec<u64>,
    index: BTreeMap<u64, NodeId>,
}

impl NodeIds {
    /// Identity mapping `i ↦ i`.
    pub fn identity(node_count: usize) -> Self {
        let mut ids = NodeIds::default();
        for i in 0..node_count {
            ids.intern(i as u64);
        }
        ids
    }

    /// Mapping that sends dense index `i` to `offset + i`.
    pub fn offset(node_count: usize, offset: u64) -> Self {
        let mut ids = NodeIds::default();
        for i in 0..node_count {
            ids.intern(offset + i as u64);
        }
        ids
    }

    /// Keeps the listed dense nodes, renumbered by their position in `nodes`.
    pub fn restrict(&self, nodes: &[NodeId]) -> Self {
        let mut ids = NodeIds::default();
        for &i in nodes {
            ids.intern(self.original[i]);
        }
        ids
    }

    fn intern(&mut self, id: u64) -> NodeId {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        let i = self.original.len();
        self.original.push(id);
        self.index.insert(id, i);
        i
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    pub fn original(&self, node: NodeId) -> u64 {
        self.original[node]
    }

    pub fn internal(&self, id: u64) -> Option<NodeId> {
        self.index.get(&id).copied()
    }

    pub fn originals(&self) -> &[u64] {
        &self.original
    }
}

/// Weighted undirected graph with a fixed orientation per edge.
///
/// Immutable once built. Every weight is positive and finite, there are no
/// self-loops, and each unordered pair appears at most once.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_count: usize,
    edges: Vec<OrientedEdge>,
    adjacency: Vec<Vec<Incidence>>,
}

impl WeightedGraph {
    /// Builds a graph over dense node ids `0..node_count`; each triple is
    /// `(head, tail, weight)`.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        if node_count == 0 {
            return Err(Error::InvalidSize("graph needs at least one node"));
        }
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        let mut adjacency = vec![Vec::new(); node_count];
        for (head, tail, weight) in edges {
            for node in [head, tail] {
                if node >= node_count {
                    return Err(Error::InvalidNode(node));
                }
            }
            if head == tail {
                return Err(Error::SelfLoop(head as u64));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight(head as u64, tail as u64, weight));
            }
            if !seen.insert((head.min(tail), head.max(tail))) {
                return Err(Error::DuplicateEdge(head as u64, tail as u64));
            }
            let edge = list.len();
            adjacency[head].push(Incidence { edge, sign: 1.0 });
            adjacency[tail].push(Incidence { edge, sign: -1.0 });
            list.push(OrientedEdge { head, tail, weight });
        }
        Ok(WeightedGraph {
            node_count,
            edges: list,
            adjacency,
        })
    }

    /// Builds a graph from `(i, j, weight)` triples over arbitrary node ids.
    ///
    /// Ids are compacted to `0..N` in order of first appearance. The first
    /// endpoint of each triple becomes the head.
    pub fn from_triples(triples: &[(u64, u64, f64)]) -> Result<(Self, NodeIds)> {
        if triples.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut ids = NodeIds::default();
        let mut seen = BTreeSet::new();
        let mut dense = Vec::with_capacity(triples.len());
        for &(i, j, w) in triples {
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight(i, j, w));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge(i, j));
            }
            let head = ids.intern(i);
            let tail = ids.intern(j);
            dense.push((head, tail, w));
        }
        let graph = WeightedGraph::new(ids.len(), dense)?;
        Ok((graph, ids))
    }

    /// Same nodes and orientation with new weights, one per edge.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        check_len(self.edge_count(), weights.len())?;
        WeightedGraph::new(
            self.node_count,
            self.edges
                .iter()
                .zip(weights)
                .map(|(e, &w)| (e.head, e.tail, w)),
        )
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &OrientedEdge {
        &self.edges[index]
    }

    /// Signed adjacency index of `node`.
    pub fn incident(&self, node: NodeId) -> &[Incidence] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    /// Edge between `a` and `b`, in either orientation.
    pub fn find_edge(&self, a: NodeId, b: NodeId) -> Option<usize> {
        self.adjacency
            .get(a)?
            .iter()
            .map(|inc| inc.edge)
            .find(|&e| self.edges[e].other(a) == b)
    }

    /// Connected components, each sorted, ordered by their smallest node.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.node_count];
        let mut out = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut component = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for inc in &self.adjacency[u] {
                    let v = self.edges[inc.edge].other(u);
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

    /// Subgraph on `nodes` (distinct), renumbered by position in `nodes`.
    /// Edges keep their relative order and orientation.
    pub fn induced(&self, nodes: &[NodeId]) -> Result<Self> {
        let mut position = vec![None; self.node_count];
        for (k, &i) in nodes.iter().enumerate() {
            if i >= self.node_count {
                return Err(Error::InvalidNode(i));
            }
            if position[i].replace(k).is_some() {
                return Err(Error::InvalidNode(i));
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| Some((position[e.head]?, position[e.tail]?, e.weight)));
        WeightedGraph::new(nodes.len(), edges.collect::<Vec<_>>())
    }

    /// `out[e] = x[e⁺] − x[e⁻]`.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (d, e) in out.iter_mut().zip(&self.edges) {
            *d = x[e.head] - x[e.tail];
        }
    }

    /// `out[i] = Σ_e sign(i, e)·d[e]`.
    pub(crate) fn adjoint_into(&self, d: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (&de, e) in d.iter().zip(&self.edges) {
            out[e.head] += de;
            out[e.tail] -= de;
        }
    }

    pub(crate) fn tv_unchecked(&self, x: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| e.weight * (x[e.head] - x[e.tail]).abs())
            .sum()
    }
}

/// Builds a graph from `(i, j, weight)` triples; see [`WeightedGraph::from_triples`].
pub fn build_graph(triples: &[(u64, u64, f64)]) -> Result<(WeightedGraph, NodeIds)> {
    WeightedGraph::from_triples(triples)
}

/// Real value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal(Vec<f64>);

impl GraphSignal {
    /// Rejects non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GraphSignal(values))
    }

    pub fn zeros(len: usize) -> Self {
        GraphSignal(vec![0.0; len])
    }

    pub fn constant(len: usize, value: f64) -> Self {
        GraphSignal(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Pointwise `self − other`.
    pub fn sub(&self, other: &GraphSignal) -> Result<GraphSignal> {
        check_len(self.len(), other.len())?;
        Ok(GraphSignal(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Pointwise `self + other`.
    pub fn add(&self, other: &GraphSignal) -> Result<GraphSignal> {
        check_len(self.len(), other.len())?;
        Ok(GraphSignal(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn max_abs_diff(&self, other: &GraphSignal) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        GraphSignal(values)
    }
}

impl Index<NodeId> for GraphSignal {
    type Output = f64;

    fn index(&self, node: NodeId) -> &f64 {
        &self.0[node]
    }
}

/// Subset of a graph's edges, stored as sorted distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet(Vec<usize>);

impl EdgeSet {
    pub fn new(graph: &WeightedGraph, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&e| e >= graph.edge_count()) {
            return Err(Error::InvalidEdgeSet(bad));
        }
        members.sort_unstable();
        members.dedup();
        Ok(EdgeSet(members))
    }

    pub fn empty() -> Self {
        EdgeSet(Vec::new())
    }

    pub fn all(graph: &WeightedGraph) -> Self {
        EdgeSet((0..graph.edge_count()).collect())
    }

    /// `E ∖ self`.
    pub fn complement(&self, graph: &WeightedGraph) -> Self {
        EdgeSet(
            (0..graph.edge_count())
                .filter(|e| !self.contains(*e))
                .collect(),
        )
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.0.binary_search(&edge).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        EdgeSet(indices)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Total variation `Σ_e W_e·|x[e⁺] − x[e⁻]|`.
pub fn tv(graph: &WeightedGraph, x: &GraphSignal) -> Result<f64> {
    check_len(graph.node_count(), x.len())?;
    Ok(graph.tv_unchecked(x.values()))
}

/// Total variation restricted to the edges in `set`.
pub fn tv_restricted(graph: &WeightedGraph, x: &GraphSignal, set: &EdgeSet) -> Result<f64> {
    check_len(graph.node_count(), x.len())?;
    if let Some(&bad) = set.indices().iter().find(|&&e| e >= graph.edge_count()) {
        return Err(Error::InvalidEdgeSet(bad));
    }
    Ok(set
        .indices()
        .iter()
        .map(|&e| {
            let edge = graph.edge(e);
            edge.weight * (x[edge.head] - x[edge.tail]).abs()
        })
        .sum())
}

/// Unweighted edge differences `d[e] = x[e⁺] − x[e⁻]`.
pub fn incidence_apply(graph: &WeightedGraph, x: &GraphSignal) -> Result<Vec<f64>> {
    check_len(graph.node_count(), x.len())?;
    let mut out = vec![0.0; graph.edge_count()];
    graph.apply_into(x.values(), &mut out);
    Ok(out)
}

/// Adjoint of [`incidence_apply`].
pub fn incidence_adjoint(graph: &WeightedGraph, d: &[f64]) -> Result<GraphSignal> {
    check_len(graph.edge_count(), d.len())?;
    let mut out = vec![0.0; graph.node_count()];
    graph.adjoint_into(d, &mut out);
    Ok(GraphSignal(out))
}

const POWER_STEPS: usize = 50;
const NORM_SAFETY: f64 = 1.01;

/// Upper bound on the spectral norm of the incidence operator.
///
/// Runs power iteration on the signless Laplacian `|D|ᵀ|D|` from the
/// normalized all-ones vector. The iterate stays positive, so the
/// Collatz–Wielandt ratio `max_i (Qv)_i / v_i` bounds `λ_max(|D|ᵀ|D|)`, which
/// dominates `λ_max(DᵀD)` (with equality on bipartite graphs). Returns the
/// square root of the smallest ratio seen, times 1.01. Graphs without edges
/// return 1.
pub fn operator_norm_bound(graph: &WeightedGraph) -> f64 {
    if graph.edge_count() == 0 {
        return 1.0;
    }
    let n = graph.node_count();
    let mut v = vec![1.0 / libm::sqrt(n as f64); n];
    let mut qv = vec![0.0; n];
    let mut best = f64::INFINITY;
    for _ in 0..POWER_STEPS {
        for (i, out) in qv.iter_mut().enumerate() {
            let incident = graph.incident(i);
            *out = incident.len() as f64 * v[i]
                + incident
                    .iter()
                    .map(|inc| v[graph.edge(inc.edge).other(i)])
                    .sum::<f64>();
        }
        let ratio = v
            .iter()
            .zip(&qv)
            .filter(|(vi, _)| **vi > 0.0)
            .fold(0.0, |m, (vi, qi)| f64::max(m, qi / vi));
        best = best.min(ratio);
        let norm = libm::sqrt(qv.iter().map(|q| q * q).sum::<f64>());
        if norm == 0.0 {
            break;
        }
        for (vi, qi) in v.iter_mut().zip(&qv) {
            *vi = qi / norm;
        }
    }
    NORM_SAFETY * libm::sqrt(best)
}
