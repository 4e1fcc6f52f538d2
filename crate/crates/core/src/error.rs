use thiserror::Error;

use crate::dyngraph::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown node handle {0}")]
    UnknownNode(NodeId),

    #[error("capacity {0:?} does not match the graph kind")]
    CapacityMismatch(Option<i64>),

    #[error("nonpositive capacity {0}")]
    NonPositiveCapacity(i64),

    #[error("negative capacity {0}")]
    NegativeCapacity(i64),

    #[error("cannot roll back {requested} entries, log holds {available}")]
    RollbackTooFar { requested: usize, available: usize },

    #[error("edge ({0}, {1}) joins two nodes on the same side")]
    SameSide(NodeId, NodeId),

    #[error("graph is not bipartite: edge ({0}, {1}) violates the declared sides")]
    NotBipartite(usize, usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),

    #[error("phase budget exhausted after {0} phases")]
    PhasesExhausted(usize),

    #[error("vector length {got} does not match dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("desk-scale guard exceeded: {0}")]
    Guard(String),

    #[error("diameter {0:?} is outside {{3, 4}}")]
    DiameterContract(Option<u32>),

    #[error("degenerate samples: {0}")]
    DegenerateSamples(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("capacity arithmetic overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
