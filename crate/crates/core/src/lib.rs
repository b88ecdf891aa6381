//! Exact order computations for QRT maps on biquadratic curves.
//!
//! The crate is layered bottom-up: [`numbers`] supplies exact tower arithmetic, [`poly`]
//! univariate polynomials, [`biquad`] the curve type with its switches, [`cubic`] the
//! Weierstrass model and the periodicity tests. [`singular`], [`walks`] and [`linkage`] are
//! the application layers.

pub mod biquad;
pub mod cubic;
pub mod error;
pub mod linkage;
pub mod numbers;
pub mod poly;
pub mod singular;
pub mod walks;

pub use biquad::{Biquadratic, CurvePoint, P1};
pub use cubic::{qrt_order, CubicModel, OrderVerdict};
pub use error::{QrtError, Result};
pub use linkage::{link_correspondence, Configuration, FourBarLink, PeriodicityReport};
pub use numbers::{
    parse_number, to_float, BigFloat, ExactNumber, NumberError, Scalar, TowerContext,
};
pub use singular::{analyze_order, classify, Case, OrderAnalysis, SingularClass};
pub use walks::{kernel, OrderMatrices, StepSet, WalkSpec};
