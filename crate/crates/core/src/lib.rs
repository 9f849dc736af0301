//! Recovery of clustered graph signals from a few sampled nodes.
//!
//! The crate has two halves:
//!
//! * [`recovery`] solves the constrained total-variation program
//!   `min ‖x‖_TV s.t. x[i] = y[i] for i ∈ M` with a primal-dual iteration.
//! * [`flow`] decides whether a sampling set `M` satisfies the network
//!   nullspace property for a partition: for every sign pattern on the
//!   boundary edges, some flow must push `κ·W_e` across each boundary edge
//!   while respecting the remaining edge capacities and conserving flow away
//!   from `M`. When it holds with `κ > 1` the program recovers every
//!   clustered signal exactly.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the `nnsp` crate.
#![no_std]

extern crate alloc;

pub mod error;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod partition;
pub mod recovery;
pub mod sampling;

pub use error::{Error, Result};
pub use flow::{
    certify_nnsp, certify_nnsp_with, empirical_nsp_check, flow_feasible, flow_feasible_with,
    max_kappa, max_kappa_with, Certificate, CertifyOptions, DemandVector, FlowAssignment,
    FlowCheck, FlowTolerance, NspCheck, NspReport, Signature, Verdict,
};
pub use generators::{
    chain_graph_experiment, grid_graph, two_cluster_chain, ChainParams, Instance,
};
pub use graph::{
    build_graph, incidence_adjoint, incidence_apply, operator_norm_bound, tv, tv_restricted,
    EdgeSet, GraphSignal, Incidence, NodeId, NodeIds, OrientedEdge, WeightedGraph,
};
pub use partition::{
    best_clustered_tv, boundary, clustered_signal, geodesic_partition, ClusterCoefficients,
    Partition,
};
pub use recovery::{
    check_stability_bound, mse, recover, BoundCheck, Observation, SolverConfig, SolverResult,
    TracePoint,
};
pub use sampling::{
    boundary_adjacent, per_cluster, per_cluster_skipping, uniform_random, PickRule, SamplingSet,
    GENERATOR,
};
