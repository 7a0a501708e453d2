//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, enumeration, fitting, and sampling.
#[derive(Debug, Error)]
pub enum Error {
    /// A model or distribution failed a structural validity check.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A probability vector failed a validity check.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An operation argument was out of its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Site count exceeds what the operation can enumerate or diagonalize.
    #[error("capacity exceeded: {sites} sites, limit {limit}")]
    Capacity { sites: usize, limit: usize },

    /// Two objects that must agree on site count do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A spin configuration or gauge vector does not cover the model's sites.
    #[error("coverage mismatch: expected {expected} sites, got {got}")]
    CoverageMismatch { expected: usize, got: usize },

    /// A matrix expected to be symmetric is not, within tolerance.
    #[error("operator is not Hermitian: max asymmetry {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    /// The sampling backend does not recognize the requested anneal label.
    #[error("unknown anneal label: {0:?}")]
    UnknownAnnealLabel(String),

    /// No catalog instance with the given name.
    #[error("unknown instance: {0:?}")]
    UnknownInstance(String),

    /// Rejection sampling exhausted its tries without hitting the target.
    #[error("no instance with degeneracy {target} found in {attempts} tries")]
    TargetDegeneracyNotFound { target: usize, attempts: usize },

    /// The remote backend has no recorded fixture for this request.
    #[error("no fixture for request hash {0}")]
    FixtureMiss(String),

    /// A remote response could not be decoded or failed validation.
    #[error("malformed response: {0}")]
    MalformedResponse(String),

    /// Transport-level failure talking to a remote endpoint.
    #[error("transport failure: {0}")]
    Transport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
