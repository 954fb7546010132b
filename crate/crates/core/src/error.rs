use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index or evaluation point lies outside the materialized data.
    #[error("range error: {0}")]
    Range(String),

    /// A numerical result cannot be delivered at the promised accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// The requested computation exceeds a fixed resource guard.
    #[error("resource error: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
pub(crate) use domain;
