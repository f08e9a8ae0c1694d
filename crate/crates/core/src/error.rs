use thiserror::Error;

use crate::step::Method;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is singular: zero pivot in column {column}")]
    Singular { column: usize },

    #[error("{method} splitting with m = {m} has a singular M part (zero pivot in column {column})")]
    SingularSplitting {
        method: Method,
        m: usize,
        column: usize,
    },

    #[error(
        "order {order} exceeds the dense limit {limit}; use the power-iteration estimate instead"
    )]
    TooLarge { order: usize, limit: usize },

    #[error("dense eigenvalue iteration did not converge")]
    EigenSolve,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
