//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violated a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested operating point is outside what the implementation supports.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative solve did not reach its stopping criterion.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A file could not be parsed. `offset` is a byte offset into the input
    /// where the problem was detected, when known.
    #[error("parse error in {path} at byte {offset}: {message}")]
    Parse {
        path: String,
        offset: u64,
        message: String,
    },

    #[error("registration failed for subject {subject}: {reason}")]
    RegistrationFailed { subject: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
