use thiserror::Error;

/// Errors raised by graph construction, certification and recovery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge list contains no edges")]
    EmptyGraph,
    #[error("duplicate edge between nodes {0} and {1}")]
    DuplicateEdge(u64, u64),
    #[error("edge ({0}, {1}) has invalid weight {2}")]
    InvalidWeight(u64, u64, f64),
    #[error("self-loop at node {0}")]
    SelfLoop(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("edge index {0} is out of range")]
    InvalidEdgeSet(usize),
    #[error("fixed flow refers to invalid or repeated edge {0}")]
    InvalidEdge(usize),
    #[error("node index {0} is out of range")]
    InvalidNode(usize),
    #[error("signal value at position {0} is not finite")]
    NonFinite(usize),
    #[error("partition does not match the graph: {0}")]
    PartitionMismatch(&'static str),
    #[error("node {0} is unreachable from every cluster center")]
    DisconnectedGraph(usize),
    #[error("cluster center {0} is listed more than once")]
    DuplicateCenter(usize),
    #[error("no cluster centers given")]
    NoCenters,
    #[error("{nodes} nodes cannot be split into {clusters} equal clusters")]
    IndivisibleClusterSize { nodes: usize, clusters: usize },
    #[error("invalid size: {0}")]
    InvalidSize(&'static str),
    #[error("sampling set is empty")]
    EmptySamplingSet,
    #[error("boundary has {size} edges, above the signature cap of {cap}")]
    BoundaryTooLarge { size: usize, cap: usize },
    #[error("sampling budget {budget} is outside 1..={nodes}")]
    InvalidBudget { budget: usize, nodes: usize },
    #[error("kappa must be positive and finite, got {0}")]
    InvalidKappa(f64),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
