use thiserror::Error;

/// Errors raised by the numerical and series routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The argument is valid mathematically but outside the range this
    /// implementation evaluates reliably.
    #[error("range error: {0}")]
    Range(String),
    /// Parameters for which no solution path is implemented.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn range(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}
