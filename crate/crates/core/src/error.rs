use thiserror::Error;

/// Errors raised by the algebra routines and the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("linear part is singular; the map is not locally invertible")]
    NotLocallyInvertible,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degree-{degree} defect is not closed; residual {residual}")]
    NotSymplectic { degree: u32, residual: String },

    #[error("cannot lift factor: {0}")]
    CannotLift(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("action is not effective: {0}")]
    NotEffective(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("relation violated for pair ({left}, {right}): got {got}, expected {expected}")]
    Relation {
        left: String,
        right: String,
        got: String,
        expected: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
