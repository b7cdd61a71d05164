//! Crate-wide error type.
//!
//! The variants map onto the process exit codes used by the CLI:
//! precondition/parse problems are usage errors (1), invariant violations
//! signal a bug in the library or an impossible identity (2), and capacity
//! errors mean a request exceeded the configured memory/size budget (3).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition.
    #[error("precondition: {0}")]
    Precondition(String),

    /// An internal identity or bound failed. This is a bug signal, not a
    /// recoverable condition.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// Request exceeds the configured size budget.
    #[error("capacity: {0}")]
    Capacity(String),

    /// Malformed input text (CLI specs, coefficient files).
    #[error("parse: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precondition(_) | Error::Parse(_) | Error::Io(_) => 1,
            Error::Invariant(_) => 2,
            Error::Capacity(_) => 3,
        }
    }
}
