//! Partitions into clusters, boundaries and clustered signals.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flow::dinic::FlowNetwork;
use crate::graph::{check_len, EdgeSet, GraphSignal, NodeId, WeightedGraph};

/// Disjoint cover of the node set by clusters `0..cluster_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cluster_of: Vec<usize>,
    cluster_count: usize,
}

impl Partition {
    /// `cluster_of[i]` is the cluster of node `i`; every id below the largest
    /// one must be used.
    pub fn new(cluster_of: Vec<usize>) -> Result<Self> {
        if cluster_of.is_empty() {
            return Err(Error::PartitionMismatch("partition covers no nodes"));
        }
        let cluster_count = cluster_of.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; cluster_count];
        for &c in &cluster_of {
            used[c] = true;
        }
        if used.iter().any(|u| !u) {
            return Err(Error::PartitionMismatch("cluster ids are not contiguous"));
        }
        Ok(Partition {
            cluster_of,
            cluster_count,
        })
    }

    /// Partition from arbitrary per-node labels. Labels are renumbered in
    /// ascending label order.
    pub fn from_labels(labels: &[u64]) -> Result<Self> {
        let mut ids = BTreeMap::new();
        for &l in labels {
            ids.insert(l, 0usize);
        }
        for (i, v) in ids.values_mut().enumerate() {
            *v = i;
        }
        Partition::new(labels.iter().map(|l| ids[l]).collect())
    }

    /// One cluster holding every node.
    pub fn single(node_count: usize) -> Self {
        Partition {
            cluster_of: vec![0; node_count],
            cluster_count: 1,
        }
    }

    /// Every node in its own cluster.
    pub fn singletons(node_count: usize) -> Self {
        Partition {
            cluster_of: (0..node_count).collect(),
            cluster_count: node_count,
        }
    }

    pub fn cluster_of(&self, node: NodeId) -> usize {
        self.cluster_of[node]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }

    pub fn node_count(&self) -> usize {
        self.cluster_of.len()
    }

    /// Members of each cluster, in ascending node order.
    pub fn clusters(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (node, &c) in self.cluster_of.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    pub fn members(&self, cluster: usize) -> Vec<NodeId> {
        (0..self.node_count())
            .filter(|&i| self.cluster_of[i] == cluster)
            .collect()
    }

    pub(crate) fn check(&self, graph: &WeightedGraph) -> Result<()> {
        if self.node_count() != graph.node_count() {
            return Err(Error::PartitionMismatch(
                "partition size differs from node count",
            ));
        }
        Ok(())
    }
}

/// One coefficient `a_C` per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCoefficients(Vec<f64>);

impl ClusterCoefficients {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ClusterCoefficients(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Edges whose endpoints lie in different clusters.
pub fn boundary(graph: &WeightedGraph, part: &Partition) -> Result<EdgeSet> {
    part.check(graph)?;
    Ok(EdgeSet::from_sorted_unchecked(
        graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| part.cluster_of(e.head()) != part.cluster_of(e.tail()))
            .map(|(i, _)| i)
            .collect(),
    ))
}

/// Piecewise-constant signal `x[i] = a[cluster_of(i)]`.
pub fn clustered_signal(
    graph: &WeightedGraph,
    part: &Partition,
    coeffs: &ClusterCoefficients,
) -> Result<GraphSignal> {
    part.check(graph)?;
    check_len(part.cluster_count(), coeffs.len())?;
    Ok(GraphSignal::from_vec_unchecked(
        part.assignments().iter().map(|&c| coeffs.0[c]).collect(),
    ))
}

/// Assigns every node to its nearest center by hop count.
///
/// Ties go to the center listed first; center `k` always lands in cluster `k`.
pub fn geodesic_partition(graph: &WeightedGraph, centers: &[NodeId]) -> Result<Partition> {
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    let n = graph.node_count();
    let mut seen = vec![false; n];
    for &c in centers {
        if c >= n {
            return Err(Error::InvalidNode(c));
        }
        if core::mem::replace(&mut seen[c], true) {
            return Err(Error::DuplicateCenter(c));
        }
    }

    let mut best = vec![(usize::MAX, usize::MAX); n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for (k, &c) in centers.iter().enumerate() {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[c] = 0;
        queue.push_back(c);
        while let Some(u) = queue.pop_front() {
            if dist[u] < best[u].0 {
                best[u] = (dist[u], k);
            }
            for inc in graph.incident(u) {
                let v = graph.edge(inc.edge).other(u);
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    if let Some(node) = best.iter().position(|b| b.1 == usize::MAX) {
        return Err(Error::DisconnectedGraph(node));
    }
    Partition::new(best.into_iter().map(|b| b.1).collect())
}

/// Boundary term `W·|d − (a[p] − a[q])|` of the clustered-fit objective,
/// with `p` the head's cluster and `q` the tail's.
#[derive(Debug, Clone, Copy)]
struct FitTerm {
    p: usize,
    q: usize,
    d: f64,
    w: f64,
}

impl FitTerm {
    fn residual(&self, a: &[f64]) -> f64 {
        self.d - (a[self.p] - a[self.q])
    }
}

fn fit_value(terms: &[FitTerm], a: &[f64]) -> f64 {
    terms.iter().map(|t| t.w * t.residual(a).abs()).sum()
}

/// Smallest `t` at which the cumulative weight reaches half the total.
fn weighted_median(points: &mut [(f64, f64)]) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = points.iter().map(|p| p.1).sum();
    let mut acc = 0.0;
    for &(t, w) in points.iter() {
        acc += w;
        if 2.0 * acc >= total {
            return Some(t);
        }
    }
    points.last().map(|p| p.0)
}

const CD_TOLERANCE: f64 = 1e-9;

fn coordinate_descent(terms: &[FitTerm], incident: &[Vec<usize>], a: &mut [f64]) {
    let k = a.len();
    let mut value = fit_value(terms, a);
    let mut targets = Vec::new();
    for _ in 0..10 * k.max(1) {
        for c in 0..k {
            targets.clear();
            for &ti in &incident[c] {
                let t = &terms[ti];
                // a[c] that zeroes the residual of this term
                if t.p == c {
                    targets.push((t.d + a[t.q], t.w));
                } else {
                    targets.push((a[t.p] - t.d, t.w));
                }
            }
            if let Some(m) = weighted_median(&mut targets) {
                a[c] = m;
            }
        }
        let next = fit_value(terms, a);
        let change = value - next;
        value = next;
        if change.abs() < CD_TOLERANCE {
            break;
        }
    }
}

/// Looks for a set of clusters whose joint upward shift decreases the
/// objective. The one-sided directional derivative along `1_S` is a modular
/// term from non-tight edges plus a cut term from tight ones, so its minimum
/// over `S` is one min-cut computation. Returns `None` when no set has a
/// negative derivative, which certifies optimality.
fn descent_set(terms: &[FitTerm], a: &[f64], scale: f64) -> Option<Vec<bool>> {
    let k = a.len();
    let tight = 1e-12 * scale;
    let mut unary = vec![0.0; k];
    let (source, sink) = (k, k + 1);
    let mut net = FlowNetwork::new(k + 2);
    for t in terms {
        let r = t.residual(a);
        if r.abs() <= tight {
            net.add_arc(t.p, t.q, t.w);
            net.add_arc(t.q, t.p, t.w);
        } else {
            // raising a[p] shrinks r; raising a[q] grows it
            let s = if r > 0.0 { 1.0 } else { -1.0 };
            unary[t.p] -= s * t.w;
            unary[t.q] += s * t.w;
        }
    }
    let mut negative = 0.0;
    for (c, &u) in unary.iter().enumerate() {
        if u < 0.0 {
            net.add_arc(source, c, -u);
            negative += u;
        } else if u > 0.0 {
            net.add_arc(c, sink, u);
        }
    }
    let derivative = negative + net.max_flow(source, sink);
    if derivative < -1e-10 * scale.max(1.0) {
        let side = net.source_side(source);
        Some(side[..k].to_vec())
    } else {
        None
    }
}

/// Best clustered approximation in TV:
/// `min_a ‖x − Σ_C a_C·I_C‖_TV`, returned as `(a*, value)`.
///
/// Interior edges contribute a constant; only boundary terms depend on `a`.
/// Cyclic coordinate descent with exact weighted-median updates does the
/// bulk of the work. When it stalls, a min-cut search over cluster subsets
/// either finds a joint move (followed by an exact line search) or proves
/// the current point optimal. The result is gauge-fixed so that `a[0]`
/// equals the mean of `x` over cluster 0.
pub fn best_clustered_tv(
    graph: &WeightedGraph,
    part: &Partition,
    x: &GraphSignal,
) -> Result<(ClusterCoefficients, f64)> {
    part.check(graph)?;
    check_len(graph.node_count(), x.len())?;
    let k = part.cluster_count();

    let mut interior = 0.0;
    let mut terms = Vec::new();
    let mut incident = vec![Vec::new(); k];
    for e in graph.edges() {
        let d = x[e.head()] - x[e.tail()];
        let (p, q) = (part.cluster_of(e.head()), part.cluster_of(e.tail()));
        if p == q {
            interior += e.weight() * d.abs();
        } else {
            incident[p].push(terms.len());
            incident[q].push(terms.len());
            terms.push(FitTerm {
                p,
                q,
                d,
                w: e.weight(),
            });
        }
    }

    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (i, &c) in part.assignments().iter().enumerate() {
        sums[c] += x[i];
        counts[c] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| s / n as f64)
        .collect();
    let mut a = means.clone();

    let scale = terms
        .iter()
        .fold(1.0, |m: f64, t| m.max(t.d.abs()).max(t.w));
    let max_rounds = 100 * (k + 1);
    for _ in 0..max_rounds {
        coordinate_descent(&terms, &incident, &mut a);
        let Some(set) = descent_set(&terms, &a, scale) else {
            break;
        };
        let mut kinks = Vec::new();
        for t in &terms {
            match (set[t.p], set[t.q]) {
                (true, false) => kinks.push((t.residual(&a), t.w)),
                (false, true) => kinks.push((-t.residual(&a), t.w)),
                _ => {}
            }
        }
        let before = fit_value(&terms, &a);
        let step = weighted_median(&mut kinks).unwrap_or(0.0);
        let mut moved = a.clone();
        for (c, inside) in set.iter().enumerate() {
            if *inside {
                moved[c] += step;
            }
        }
        if fit_value(&terms, &moved) >= before {
            break;
        }
        a = moved;
    }

    let shift = means[0] - a[0];
    a.iter_mut().for_each(|v| *v += shift);
    let value = interior + fit_value(&terms, &a);
    Ok((ClusterCoefficients(a), value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, tv, tv_restricted};

    fn path5() -> WeightedGraph {
        build_graph(&[(1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0)])
            .unwrap()
            .0
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![0, 2]).is_err());
        assert!(Partition::new(vec![]).is_err());
        let p = Partition::from_labels(&[7, 3, 7]).unwrap();
        assert_eq!(p.assignments(), &[1, 0, 1]);
        assert_eq!(p.cluster_count(), 2);
    }

    #[test]
    fn single_cluster_has_empty_boundary() {
        let g = path5();
        assert!(boundary(&g, &Partition::single(5)).unwrap().is_empty());
        assert!(boundary(&g, &Partition::single(4)).is_err());
    }

    #[test]
    fn geodesic_examples() {
        let g = path5();
        let p = geodesic_partition(&g, &[0, 4]).unwrap();
        assert_eq!(p.assignments(), &[0, 0, 0, 1, 1]);
        let p = geodesic_partition(&g, &[4, 0]).unwrap();
        assert_eq!(p.assignments(), &[1, 1, 0, 0, 0]);
        let p = geodesic_partition(&g, &[2]).unwrap();
        assert_eq!(p.cluster_count(), 1);
        let p = geodesic_partition(&g, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(p.assignments(), &[0, 1, 2, 3, 4]);
        assert_eq!(
            geodesic_partition(&g, &[1, 1]).unwrap_err(),
            Error::DuplicateCenter(1)
        );
        assert_eq!(geodesic_partition(&g, &[]).unwrap_err(), Error::NoCenters);
    }

    #[test]
    fn geodesic_reports_unreachable_nodes() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(
            geodesic_partition(&g, &[0]).unwrap_err(),
            Error::DisconnectedGraph(2)
        );
        assert!(geodesic_partition(&g, &[0, 3]).is_ok());
    }

    #[test]
    fn clustered_signal_is_flat_inside_clusters() {
        let g = path5();
        let part = Partition::new(vec![0, 0, 1, 1, 1]).unwrap();
        let coeffs = ClusterCoefficients::new(vec![1.0, 3.0]).unwrap();
        let x = clustered_signal(&g, &part, &coeffs).unwrap();
        assert_eq!(x.values(), &[1.0, 1.0, 3.0, 3.0, 3.0]);
        let b = boundary(&g, &part).unwrap();
        assert_eq!(b.indices(), &[1]);
        assert_eq!(tv_restricted(&g, &x, &b.complement(&g)).unwrap(), 0.0);
        assert_eq!(tv(&g, &x).unwrap(), 2.0);
        let bad = ClusterCoefficients::new(vec![1.0]).unwrap();
        assert!(clustered_signal(&g, &part, &bad).is_err());
    }

    #[test]
    fn weighted_median_picks_lower_median() {
        let mut pts = [(3.0, 1.0), (1.0, 1.0), (2.0, 1.0), (10.0, 1.0)];
        assert_eq!(weighted_median(&mut pts), Some(2.0));
        let mut pts = [(0.0, 1.0), (5.0, 3.0)];
        assert_eq!(weighted_median(&mut pts), Some(5.0));
    }

    #[test]
    fn best_fit_of_clustered_signal_is_exact() {
        let g = path5();
        let part = Partition::new(vec![0, 0, 1, 1, 2]).unwrap();
        let coeffs = ClusterCoefficients::new(vec![2.0, -1.0, 4.0]).unwrap();
        let x = clustered_signal(&g, &part, &coeffs).unwrap();
        let (a, value) = best_clustered_tv(&g, &part, &x).unwrap();
        assert!(value.abs() < 1e-12);
        for (u, v) in a.values().iter().zip(coeffs.values()) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
