//! JSON shapes written by the commands.

use nnsp_core::{Certificate, NodeIds, SolverConfig, WeightedGraph};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertificateSummary {
    pub certified: bool,
    pub kappa: f64,
    pub below_threshold: bool,
    pub boundary_size: usize,
    /// Boundary edges as original `[head, tail]` pairs, in edge-list order.
    pub boundary: Vec<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_signature: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_count: Option<u64>,
}

impl CertificateSummary {
    pub fn new(cert: &Certificate, graph: &WeightedGraph, ids: &NodeIds) -> Self {
        let boundary = cert
            .boundary
            .indices()
            .iter()
            .map(|&e| {
                let edge = graph.edge(e);
                [ids.original(edge.head()), ids.original(edge.tail())]
            })
            .collect();
        let (failing_signature, witness_count) = match &cert.verdict {
            nnsp_core::Verdict::Certified { witness_count, .. } => (None, Some(*witness_count)),
            nnsp_core::Verdict::Refuted { failing } => (Some(failing.signs().to_vec()), None),
        };
        CertificateSummary {
            certified: cert.certified(),
            kappa: cert.kappa,
            below_threshold: cert.below_threshold(),
            boundary_size: cert.boundary.len(),
            boundary,
            failing_signature,
            witness_count,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertifyOutput {
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_kappa: Option<f64>,
}

/// Serializable mirror of [`SolverConfig`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub step_scale: f64,
    pub trace_every: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings::from(SolverConfig::default())
    }
}

impl From<SolverConfig> for SolverSettings {
    fn from(c: SolverConfig) -> Self {
        SolverSettings {
            max_iterations: c.max_iterations,
            tolerance: c.tolerance,
            step_scale: c.step_scale,
            trace_every: c.trace_every,
        }
    }
}

impl From<SolverSettings> for SolverConfig {
    fn from(s: SolverSettings) -> Self {
        SolverConfig {
            max_iterations: s.max_iterations,
            tolerance: s.tolerance,
            step_scale: s.step_scale,
            trace_every: s.trace_every,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RecoverOutput {
    pub iterations: usize,
    pub converged: bool,
    pub tv: f64,
    pub sampled: usize,
    pub nodes: usize,
}
