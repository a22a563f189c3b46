use thiserror::Error;

use crate::volume::VolumeEstimate;

/// Errors raised by the geometry engine.
#[derive(Debug, Error)]
pub enum GeomError {
    /// Body construction input was rejected (asymmetric lists, singular matrices, ...).
    #[error("invalid body: {0}")]
    InvalidBody(String),

    /// A numeric argument violated an operation precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested tolerance was not reached within the sample/vertex budget.
    #[error("budget exceeded: best estimate {} ± {}", best.value, best.abs_error)]
    BudgetExceeded { best: VolumeEstimate },

    #[error("empty intersection")]
    Empty,

    /// The operation needs a smooth strictly convex body.
    #[error("operation requires a smooth strictly convex body ({0})")]
    NotSmooth(String),

    /// A boundary crossing where the two normals are nearly parallel.
    #[error("ill-conditioned crossing: |<M,N>| = {cos} exceeds 1 - {eps}")]
    IllConditionedCrossing { cos: f64, eps: f64 },

    #[error("h too small for volume tolerance: {0}")]
    HTooSmall(String),

    #[error("delta outside (0, min(1,tau^n)|K|) = (0, {upper}): got {delta}")]
    DeltaOutOfRange { delta: f64, upper: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl GeomError {
    /// True for errors that come from running out of a numerical budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            GeomError::BudgetExceeded { .. } | GeomError::HTooSmall(_) | GeomError::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(GeomError::DimensionMismatch { expected, got })
    }
}
