use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("invalid parameter: {0}")]
    Domain(String),

    /// A request exceeds a documented size limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An assignment does not match the problem size.
    #[error("shape mismatch: expected {expected} bits, got {actual}")]
    Shape { expected: usize, actual: usize },

    /// Arguments are inconsistent with each other (for example a subgraph that
    /// is not contained in its parent graph).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fit needs at least 2 usable points, got {0}")]
    InsufficientData(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
