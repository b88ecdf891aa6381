use thiserror::Error;

use crate::numbers::NumberError;

/// Errors raised by the curve, walk and linkage layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QrtError {
    #[error(transparent)]
    Number(#[from] NumberError),
    /// Input violates a documented precondition (bad arguments, malformed files).
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("the coefficient matrix is identically zero")]
    ZeroCurve,
    #[error("line component through the point: {0}")]
    LineComponent(String),
    #[error("the entire fiber over {0} lies on the curve (vertical line component)")]
    EntireFiber(String),
    #[error("the curve is singular (F = 0); use the singular-curve analysis")]
    SingularCurve,
    #[error("Taylor series too short: need C_{needed}, have up to C_{have}")]
    InsufficientSeries { needed: usize, have: usize },
    #[error("pole: {0}")]
    Pole(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    /// A self-test failed; this indicates a bug rather than bad input.
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl QrtError {
    /// True for errors that signal a defect in the library rather than in the input.
    pub fn is_internal(&self) -> bool {
        matches!(self, QrtError::Internal(_))
    }
}

pub type Result<T, E = QrtError> = std::result::Result<T, E>;
