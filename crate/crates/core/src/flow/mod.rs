//! Flow-based certification of the network nullspace property.
//!
//! A sampling set `M` satisfies the property for a partition with strength
//! `κ` when, for every sign pattern `σ` on the boundary edges, there is a
//! signed edge flow that
//!
//! * carries exactly `κ·σ_e·W_e` on each boundary edge `e`,
//! * stays within `|f[e]| ≤ W_e` on every other edge, and
//! * is conserved at every node outside `M`.
//!
//! Each pattern is a circulation-with-demands problem. Boundary edges are
//! removed and their fixed values folded into node demands; sampled nodes are
//! tied to a super node with unbounded arcs, which absorbs whatever they emit
//! or consume; feasibility is then one max-flow computation.
//!
//! Sign convention: a positive `f[e]` moves flow from the tail `e⁻` to the
//! head `e⁺`, so the net inflow at node `i` is
//! `Σ_{e: e⁺ = i} f[e] − Σ_{e: e⁻ = i} f[e]`.

pub mod dinic;
mod nsp;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{EdgeSet, WeightedGraph};
use crate::partition::{boundary, Partition};
use crate::sampling::SamplingSet;
use dinic::FlowNetwork;

pub use nsp::{empirical_nsp_check, NspCheck, NspReport};

/// Net inflow per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandVector(pub Vec<f64>);

/// Signed flow value per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment(pub Vec<f64>);

/// Residuals of a flow against its constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowCheck {
    /// Largest `|g[i]|` over nodes outside the free set.
    pub conservation_error: f64,
    /// Largest `|f[e]| − W_e` over edges that are not fixed (≤ 0 when
    /// every capacity holds).
    pub capacity_excess: f64,
    /// Largest deviation from the prescribed value over fixed edges.
    pub fixed_error: f64,
}

impl FlowCheck {
    pub fn holds(&self, conservation_tol: f64, capacity_tol: f64) -> bool {
        self.conservation_error <= conservation_tol
            && self.capacity_excess <= capacity_tol
            && self.fixed_error <= conservation_tol
    }
}

impl FlowAssignment {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Net inflow at every node.
    pub fn demands(&self, graph: &WeightedGraph) -> DemandVector {
        let mut g = vec![0.0; graph.node_count()];
        for (f, e) in self.0.iter().zip(graph.edges()) {
            g[e.head()] += f;
            g[e.tail()] -= f;
        }
        DemandVector(g)
    }

    pub fn negated(&self) -> FlowAssignment {
        FlowAssignment(self.0.iter().map(|f| -f).collect())
    }

    /// Measures how far this flow is from satisfying `fixed` values, unit
    /// capacities on the remaining edges, and conservation outside `free`.
    pub fn check(
        &self,
        graph: &WeightedGraph,
        fixed: &[(usize, f64)],
        free: &SamplingSet,
    ) -> FlowCheck {
        let mut is_fixed = vec![false; graph.edge_count()];
        let mut fixed_error: f64 = 0.0;
        for &(e, v) in fixed {
            is_fixed[e] = true;
            fixed_error = fixed_error.max((self.0[e] - v).abs());
        }
        let capacity_excess = graph
            .edges()
            .iter()
            .zip(&self.0)
            .zip(&is_fixed)
            .filter(|(_, &fx)| !fx)
            .map(|((e, f), _)| f.abs() - e.weight())
            .fold(f64::NEG_INFINITY, f64::max);
        let demands = self.demands(graph);
        let conservation_error = demands
            .0
            .iter()
            .enumerate()
            .filter(|(i, _)| !free.contains(*i))
            .fold(0.0, |m: f64, (_, g)| m.max(g.abs()));
        FlowCheck {
            conservation_error,
            capacity_excess: if capacity_excess.is_finite() {
                capacity_excess
            } else {
                0.0
            },
            fixed_error,
        }
    }
}

/// Tolerances used when deciding feasibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowTolerance {
    /// Source arcs count as saturated when the routed flow is within
    /// `saturation·max(1, total)` of their total capacity.
    pub saturation: f64,
}

impl Default for FlowTolerance {
    fn default() -> Self {
        FlowTolerance { saturation: 1e-9 }
    }
}

/// Finds a flow that agrees with `fixed` on the listed edges, obeys
/// `|f[e]| ≤ W_e` elsewhere, and is conserved at every node outside `free`.
/// Returns `Ok(None)` when no such flow exists.
pub fn flow_feasible(
    graph: &WeightedGraph,
    fixed: &[(usize, f64)],
    free: &SamplingSet,
) -> Result<Option<FlowAssignment>> {
    flow_feasible_with(graph, fixed, free, FlowTolerance::default())
}

/// [`flow_feasible`] with explicit tolerances.
pub fn flow_feasible_with(
    graph: &WeightedGraph,
    fixed: &[(usize, f64)],
    free: &SamplingSet,
    tol: FlowTolerance,
) -> Result<Option<FlowAssignment>> {
    if free.is_empty() {
        return Err(Error::EmptySamplingSet);
    }
    let n = graph.node_count();
    if let Some(&bad) = free.nodes().iter().find(|&&i| i >= n) {
        return Err(Error::InvalidNode(bad));
    }
    let mut fixed_value = vec![None; graph.edge_count()];
    for &(e, v) in fixed {
        if e >= graph.edge_count() || fixed_value[e].is_some() || !v.is_finite() {
            return Err(Error::InvalidEdge(e));
        }
        fixed_value[e] = Some(v);
    }

    // Net inflow the free edges must deliver at each node.
    let mut need = vec![0.0; n];
    for (e, v) in fixed_value.iter().enumerate() {
        if let Some(v) = v {
            let edge = graph.edge(e);
            need[edge.head()] -= v;
            need[edge.tail()] += v;
        }
    }

    let hub = n;
    let (source, sink) = (n + 1, n + 2);
    let mut net = FlowNetwork::new(n + 3);
    for &i in free.nodes() {
        net.add_arc(hub, i, f64::INFINITY);
        net.add_arc(i, hub, f64::INFINITY);
    }
    // (tail → head, head → tail) arc ids per free edge
    let mut arcs = vec![None; graph.edge_count()];
    for (e, edge) in graph.edges().iter().enumerate() {
        if fixed_value[e].is_none() {
            let forward = net.add_arc(edge.tail(), edge.head(), edge.weight());
            let backward = net.add_arc(edge.head(), edge.tail(), edge.weight());
            arcs[e] = Some((forward, backward));
        }
    }
    let mut hub_need = 0.0;
    let mut supply = 0.0;
    let mut attach = |net: &mut FlowNetwork, node: usize, r: f64| {
        if r > 0.0 {
            net.add_arc(node, sink, r);
        } else if r < 0.0 {
            net.add_arc(source, node, -r);
            supply -= r;
        }
    };
    for (i, &r) in need.iter().enumerate() {
        if !free.contains(i) {
            attach(&mut net, i, r);
            hub_need -= r;
        }
    }
    attach(&mut net, hub, hub_need);

    let routed = net.max_flow(source, sink);
    if routed < supply - tol.saturation * supply.max(1.0) {
        return Ok(None);
    }
    let flows = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| match (fixed_value[e], arcs[e]) {
            (Some(v), _) => v,
            (None, Some((fw, bw))) => {
                (net.flow(fw) - net.flow(bw)).clamp(-edge.weight(), edge.weight())
            }
            (None, None) => unreachable!("every edge is fixed or carries arcs"),
        })
        .collect();
    Ok(Some(FlowAssignment(flows)))
}

/// Sign pattern over the boundary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    edges: Vec<usize>,
    signs: Vec<i8>,
}

impl Signature {
    /// Pattern number `index` over `edges`. The first edge is always `−1`;
    /// edge `j ≥ 1` is `+1` exactly when bit `j − 1` of `index` is set.
    /// Patterns with the first edge at `+1` are the negations of these.
    pub fn enumerated(edges: &[usize], index: u64) -> Self {
        let signs = (0..edges.len())
            .map(|j| {
                if j > 0 && (index >> (j - 1)) & 1 == 1 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Signature {
            edges: edges.to_vec(),
            signs,
        }
    }

    pub fn new(edges: Vec<usize>, signs: Vec<i8>) -> Self {
        assert_eq!(edges.len(), signs.len());
        assert!(signs.iter().all(|s| *s == 1 || *s == -1));
        Signature { edges, signs }
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign_of(&self, edge: usize) -> Option<i8> {
        self.edges
            .iter()
            .position(|&e| e == edge)
            .map(|j| self.signs[j])
    }

    pub fn negated(&self) -> Signature {
        Signature {
            edges: self.edges.clone(),
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    /// Boundary values `κ·σ_e·W_e`.
    pub fn fixed_flows(&self, graph: &WeightedGraph, kappa: f64) -> Vec<(usize, f64)> {
        self.edges
            .iter()
            .zip(&self.signs)
            .map(|(&e, &s)| (e, kappa * f64::from(s) * graph.edge(e).weight()))
            .collect()
    }
}

/// Number of patterns checked for a boundary of `size` edges.
pub fn signature_count(size: usize) -> u64 {
    if size == 0 {
        1
    } else {
        1u64 << (size - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every pattern admits a flow. Witnesses are kept only when requested;
    /// patterns not listed are negations of listed ones.
    Certified {
        witness_count: u64,
        witnesses: Vec<(Signature, FlowAssignment)>,
    },
    /// The first pattern, in enumeration order, with no admissible flow.
    Refuted { failing: Signature },
}

/// Outcome of checking the nullspace property at one `κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub kappa: f64,
    pub boundary: EdgeSet,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        matches!(self.verdict, Verdict::Certified { .. })
    }

    /// The property proper requires `κ > 1`; smaller values are still
    /// evaluated so the largest feasible `κ` can be located.
    pub fn below_threshold(&self) -> bool {
        self.kappa <= 1.0
    }

    pub fn failing_signature(&self) -> Option<&Signature> {
        match &self.verdict {
            Verdict::Refuted { failing } => Some(failing),
            Verdict::Certified { .. } => None,
        }
    }

    pub fn witnesses(&self) -> &[(Signature, FlowAssignment)] {
        match &self.verdict {
            Verdict::Certified { witnesses, .. } => witnesses,
            Verdict::Refuted { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Largest boundary accepted; enumeration visits `2^(|∂F|−1)` patterns.
    pub signature_cap: usize,
    pub keep_witnesses: bool,
    pub tolerance: FlowTolerance,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            signature_cap: 30,
            keep_witnesses: true,
            tolerance: FlowTolerance::default(),
        }
    }
}

/// Checks every boundary sign pattern at strength `kappa`.
pub fn certify_nnsp(
    graph: &WeightedGraph,
    part: &Partition,
    samples: &SamplingSet,
    kappa: f64,
) -> Result<Certificate> {
    certify_nnsp_with(graph, part, samples, kappa, &CertifyOptions::default())
}

pub fn certify_nnsp_with(
    graph: &WeightedGraph,
    part: &Partition,
    samples: &SamplingSet,
    kappa: f64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidKappa(kappa));
    }
    let bnd = boundary(graph, part)?;
    if bnd.len() > opts.signature_cap || bnd.len() > 63 {
        return Err(Error::BoundaryTooLarge {
            size: bnd.len(),
            cap: opts.signature_cap.min(63),
        });
    }
    let count = signature_count(bnd.len());
    let mut witnesses = Vec::new();
    for index in 0..count {
        let sig = Signature::enumerated(bnd.indices(), index);
        let fixed = sig.fixed_flows(graph, kappa);
        match flow_feasible_with(graph, &fixed, samples, opts.tolerance)? {
            Some(flow) => {
                if opts.keep_witnesses {
                    witnesses.push((sig, flow));
                }
            }
            None => {
                return Ok(Certificate {
                    kappa,
                    boundary: bnd,
                    verdict: Verdict::Refuted { failing: sig },
                })
            }
        }
    }
    Ok(Certificate {
        kappa,
        boundary: bnd,
        verdict: Verdict::Certified {
            witness_count: count,
            witnesses,
        },
    })
}

/// Largest certified `κ`, located by doubling from 1 (up to `2^20`) and then
/// bisecting to an absolute tolerance of `1e-3`.
pub fn max_kappa(graph: &WeightedGraph, part: &Partition, samples: &SamplingSet) -> Result<f64> {
    max_kappa_with(graph, part, samples, &CertifyOptions::default())
}

pub fn max_kappa_with(
    graph: &WeightedGraph,
    part: &Partition,
    samples: &SamplingSet,
    opts: &CertifyOptions,
) -> Result<f64> {
    const CEILING: f64 = (1u64 << 20) as f64;
    const TOLERANCE: f64 = 1e-3;
    let opts = CertifyOptions {
        keep_witnesses: false,
        ..*opts
    };
    let holds = |kappa: f64| -> Result<bool> {
        Ok(certify_nnsp_with(graph, part, samples, kappa, &opts)?.certified())
    };

    let (mut lo, mut hi) = (0.0, 1.0);
    while holds(hi)? {
        lo = hi;
        if hi >= CEILING {
            return Ok(CEILING);
        }
        hi *= 2.0;
    }
    while hi - lo > TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
