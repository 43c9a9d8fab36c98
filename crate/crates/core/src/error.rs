use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown node id {0}")]
    UnknownNode(NodeId),

    #[error("separator strategy failed: {0}")]
    Strategy(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("estimated memory {estimate} bytes exceeds cap of {cap} bytes")]
    MemoryCap { estimate: u64, cap: u64 },

    #[error("hierarchy file: {0}")]
    Format(String),

    #[error("sites {0} and {1} are not mutually reachable")]
    Unreachable(NodeId, NodeId),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
