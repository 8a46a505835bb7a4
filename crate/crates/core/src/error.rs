//! Error type shared by every module.

use thiserror::Error;

/// Errors returned by constructors and operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry encountered in {0}")]
    NonFinite(&'static str),

    #[error("prior distribution entry is negative or non-finite at ({x},{y})")]
    InvalidPriorEntry { x: usize, y: usize },

    #[error("prior distribution sums to {sum}, expected 1 within 1e-12")]
    UnnormalizedPrior { sum: f64 },

    #[error("game is not square; operation requires matching input/output sets")]
    NotSquare,

    #[error("graph has no edges")]
    EmptyEdgeSet,

    #[error("graph edge ({u},{v}) is invalid for {n} vertices")]
    InvalidEdge { u: usize, v: usize, n: usize },

    #[error("rule tensor would need {needed} entries, exceeding the cap of {cap}")]
    TensorCap { needed: u128, cap: u128 },

    #[error("enumeration needs {needed} candidates, exceeding the cap of {cap}")]
    EnumerationCap { needed: u128, cap: u128 },

    #[error("first row does not define a symmetric circulant")]
    AsymmetricCirculantRow,

    #[error("matrix is not positive semidefinite within tolerance")]
    NotPsd,

    #[error("matrix diagonal is not unit within tolerance")]
    NotUnitDiagonal,

    #[error("solution is not certified; operation requires a certified solution")]
    Uncertified,

    #[error("not a synchronous XOR game: {0}")]
    NotSynchronousXor(&'static str),

    #[error("cycle length must be odd and at least 3, got {0}")]
    InvalidCycleLength(usize),

    #[error("probability weight {0} outside [0,1]")]
    InvalidWeight(f64),

    #[error("measurement family violates an invariant: {0}")]
    InvariantViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
