use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node index {0} out of range")]
    NodeIndex(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exponential oracles refuse inputs above their size gate.
    #[error("{what} supports at most {limit} nodes, got {got}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("unknown dataset `{name}` (available: {available})")]
    UnknownDataset { name: String, available: String },
}
