//! Crate-wide error type.

use std::path::PathBuf;

/// Errors surfaced by loaders, validators and the training pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed line in an input file, with its 1-based line number.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Input data violates a structural invariant (asymmetric weights,
    /// dimensionality mismatch, bad hyperparameter, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// An operation was asked of a node that cannot support it
    /// (e.g. transition probabilities of an isolated node).
    #[error("degenerate node: {0}")]
    Degenerate(String),

    /// Tensor shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A non-finite value appeared where the pipeline requires finite math.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A statistic is undefined for the given inputs (e.g. zero-variance
    /// correlation series).
    #[error("undefined statistic: {0}")]
    Undefined(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI maps this error to: 1 for bad inputs or
    /// configuration, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::Degenerate(_)
            | Error::Shape(_)
            | Error::Undefined(_) => 1,
            Error::NonFinite(_) | Error::Io(_) => 2,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
