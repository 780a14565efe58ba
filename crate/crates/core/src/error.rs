use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no hyperedges")]
    NoHyperedges,

    #[error("hyperedge must contain at least two distinct nodes, got {0}")]
    EdgeTooSmall(usize),

    #[error("node id {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: u64, node_count: usize },

    #[error("hypergraph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("operation requires an explicit hyperedge list")]
    NotExplicit,

    #[error("not a clustered state: cluster spread {spread:e} exceeds tolerance {tolerance:e}")]
    NotClustered { spread: f64, tolerance: f64 },

    #[error("bound undefined at lambda=1")]
    BoundUndefined,

    #[error("no concordant sizes")]
    NoConcordantSizes,

    #[error("opinion state has {got} entries but the hypergraph has {expected} nodes")]
    StateLength { expected: usize, got: usize },

    #[error("non-finite opinion at node {0}")]
    NonFinite(usize),

    #[error("no concordant hyperedge found after {0} resamples")]
    NoConcordantPick(u64),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
