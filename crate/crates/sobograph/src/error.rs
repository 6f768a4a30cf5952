use thiserror::Error;

/// Error variants across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Syntax or content error in an input file; the message carries the
    /// position (serde_json reports line and column, TSV loaders report the
    /// line number).
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("unknown node label '{0}'")]
    UnknownLabel(String),

    #[error("graph is not connected (node {0} unreachable)")]
    Disconnected(usize),

    /// Two distinct parent edges reach `node` at equal distance within `tol`:
    /// the unique-shortest-path assumption fails for the chosen root.
    #[error(
        "ambiguous shortest paths at node {node}: edges {e1} and {e2} \
         reach it at equal length (tolerance {tol:e})"
    )]
    AmbiguousPath {
        node: usize,
        e1: usize,
        e2: usize,
        tol: f64,
    },

    #[error("no unique-path root")]
    EmptyRootSet,

    #[error("measure references node {0} outside the graph")]
    MeasureOutOfRange(usize),

    #[error("measure mass sums to {0}, expected 1 (use normalization to rescale)")]
    MassNotNormalized(f64),

    #[error("negative mass {mass} on node {node}")]
    NegativeMass { node: usize, mass: f64 },

    #[error("order p must be finite and >= 1, got {0} (p = infinity is unsupported)")]
    InvalidOrder(f64),

    #[error("expected 1 <= p < q with both finite, got p = {p}, q = {q}")]
    InvalidOrderPair { p: f64, q: f64 },

    #[error("total masses differ beyond tolerance: {0} vs {1}")]
    UnequalMass(f64, f64),

    #[error("profile violates the mass-assignment constraints: {0}")]
    KNotSatisfied(String),

    #[error("kernel order p must lie in [1, 2], got {0}")]
    KernelOrderOutOfRange(f64),

    #[error("kernel bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("all sampled distances are zero; no bandwidth can be derived")]
    AllDistancesZero,

    #[error("matrix is not symmetric (max deviation {0:e})")]
    AsymmetricMatrix(f64),

    #[error("index was not built on a tree")]
    NotATree,

    #[error("root/index mismatch: index has root {index_root}, slice expects {expected}")]
    RootIndexMismatch { index_root: usize, expected: usize },

    #[error("slice weights sum to {0}, expected 1")]
    SliceWeightsNotNormalized(f64),

    #[error("invalid slice specification: {0}")]
    InvalidSliceSpec(String),

    #[error("point cloud is empty")]
    EmptyPointCloud,

    #[error("invalid point cloud: {0}")]
    InvalidPointCloud(String),

    #[error("point {0} has no cluster assignment")]
    UnassignedPoint(usize),

    #[error("invalid build specification: {0}")]
    InvalidBuildSpec(String),

    #[error("transport solver exceeded its pivot budget")]
    SolverStalled,

    #[error("index file does not match the graph: {0}")]
    IndexMismatch(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
