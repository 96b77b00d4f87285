//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the optics, fitting and sweep routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A camera configuration violates a geometric constraint.
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of its node budget before converging.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// A curve does not satisfy the preconditions of a fit operation.
    #[error("fit error: {0}")]
    Fit(String),

    /// A sweep record could not be evaluated.
    #[error("sweep record ({context}): {source}")]
    SweepRecord {
        context: String,
        #[source]
        source: Box<Error>,
    },

    /// File or serialization failure, with path context.
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    /// Malformed table or CSV input.
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
