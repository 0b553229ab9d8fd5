//! Library error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed lattice input (odd diagonal, asymmetric, singular, ...).
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    /// A caller-side precondition was violated (scale mismatch, bad parameter, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Discriminant form or matrix would exceed the configured size guard.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    /// Input outside the implemented domain (indefinite theta, even p for BS, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A relation check had no coefficients to compare.
    #[error("empty comparison range: {0}")]
    EmptyComparison(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
