use thiserror::Error;

/// Errors raised by constructors, samplers and entanglement routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BakerError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("matrix is not unitary: max |U U^dag - I| = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("matrix does not commute with the reflection: max |U R - R U| = {commutator:e}")]
    NotReflectionSymmetric { commutator: f64 },

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed matrix file: {0}")]
    Format(String),
}

impl BakerError {
    /// True for failures of a numerical precondition (as opposed to a
    /// malformed request).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            BakerError::NotUnitary { .. } | BakerError::NotReflectionSymmetric { .. } | BakerError::EigenSolver(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, BakerError>;
