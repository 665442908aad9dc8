use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs violate a precondition (wrong dimensions, out-of-range parameters, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested computation is refused because it would exceed a hard size cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// A numerical routine failed to reach its target accuracy.
    #[error("numeric failure: {message} (achieved {achieved:e})")]
    Numeric { message: String, achieved: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
