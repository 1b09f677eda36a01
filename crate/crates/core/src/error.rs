use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid configuration or argument value.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A computational guard (enumeration size, matrix size) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// An iterative procedure failed to converge or produced a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Moments cannot be matched by a Gamma law.
    #[error("degenerate moment set: {0}")]
    Fit(String),
    /// Malformed serialized input.
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
