//! Error types shared across the library.

use crate::representations::RepresentationKind;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Zero momentum transfer: the Born term `4 pi q1 q2 / |k - k'|^2` diverges.
    #[error("forward singularity: |k - k'| = 0, the Born term diverges")]
    ForwardSingularity,

    /// `gamma` sits on a bound-state pole of the full T-matrix.
    #[error("bound-state pole at gamma = {gamma}: the full T-matrix diverges at this energy; use the generalized representations for gamma = -1")]
    BoundStatePole { gamma: f64 },

    /// Requested accuracy could not be reached. Carries the best estimate so
    /// callers can decide whether it is still usable.
    #[error("accuracy failure: {message} (best estimate {value:e}, error estimate {error_estimate:e})")]
    Accuracy {
        message: String,
        value: f64,
        error_estimate: f64,
    },

    /// Operation outside its supported parameter set.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Representation requested for a context it is not defined on.
    #[error("representation `{kind}` is not valid for gamma = {gamma}; admissible: {admissible}")]
    InvalidRepresentation {
        kind: RepresentationKind,
        gamma: f64,
        admissible: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
