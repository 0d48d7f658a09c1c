use thiserror::Error;

/// Errors raised by cone, bath and gap computations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Arguments are individually valid but mutually inconsistent.
    #[error("argument error: {0}")]
    Argument(String),

    /// A matrix or state does not have the structure the operation requires.
    #[error("structure error: {0}")]
    Structure(String),

    /// Requested problem size exceeds a dense-computation guard.
    #[error("resource error: {0}")]
    Resource(String),

    /// An internally reconstructed quantity violated its own contract.
    #[error("internal consistency error: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
