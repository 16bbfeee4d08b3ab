use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Arguments outside the domain of the operation (bad ranges, malformed sets).
    #[error("domain error: {0}")]
    Domain(String),
    /// Input is well-formed but violates a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The computation would exceed a configured size or time budget.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn resource<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Resource(msg.into()))
}
