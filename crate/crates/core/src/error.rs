//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by grid construction, encoding, simulation, and analysis.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor argument violates its documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data lies outside the mathematical domain of the operation
    /// (e.g. a negative probability mass handed to the square-root encoder).
    #[error("domain error: {0}")]
    Domain(String),

    /// A vector that must carry unit mass or unit norm does not.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// Two objects that must share a shape or grid do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numerical self-check failed mid-computation (norm drift, imaginary
    /// residue, diagonalization deviation).
    #[error("numerical consistency error: {0}")]
    Consistency(String),

    /// The request exceeds a hard simulator size cap.
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;
