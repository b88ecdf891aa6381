//! Scalars: exact quadratic-tower numbers, big floats, and the surd parser.

mod exact;
mod float;
mod parse;
mod recognize;
mod scalar;

pub use exact::{common_field, ExactNumber, Field, TowerContext, MAX_DEPTH};
pub use float::{bits_for_digits, to_float, BigFloat, DEFAULT_DIGITS};
pub use parse::parse_number;
pub use recognize::{
    chebyshev_t, recognize_cos_squared, recognize_cos_squared_float, CosSquared, Recognition,
};
pub use scalar::Scalar;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negative radicand {value} at position {pos}")]
    NegativeRadicandAt { pos: usize, value: String },
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("zero denominator at position {pos}")]
    ZeroDenominator { pos: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("values come from incompatible quadratic towers")]
    IncompatibleTowers,
    #[error("tower depth limit {0} exceeded")]
    DepthExceeded(usize),
}
