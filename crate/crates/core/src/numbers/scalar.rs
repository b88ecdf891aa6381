//! Minimal field interface shared by the exact and floating code paths.

use std::fmt::Debug;

use super::{BigFloat, ExactNumber};

/// Field operations plus a mode-appropriate zero test.
pub trait Scalar: Clone + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn int_like(&self, n: i64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    /// Division; callers check `is_zero_s` on the divisor first.
    fn over(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// Exact zero for exact values, `|x| < ε` for floating ones.
    fn is_zero_s(&self) -> bool;
    fn approx(&self) -> f64;
}

impl Scalar for ExactNumber {
    fn zero_like(&self) -> Self {
        ExactNumber::zero()
    }
    fn int_like(&self, n: i64) -> Self {
        ExactNumber::from_int(n)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negate(&self) -> Self {
        self.negated()
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
}

impl Scalar for BigFloat {
    fn zero_like(&self) -> Self {
        BigFloat::from_i64(0, self.digits()).with_eps_digits(self.eps_digits())
    }
    fn int_like(&self, n: i64) -> Self {
        BigFloat::from_i64(n, self.digits()).with_eps_digits(self.eps_digits())
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn minus(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn over(&self, o: &Self) -> Self {
        self.div(o)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
}

/// Double precision with an absolute zero threshold of 1e-12.
impl Scalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn int_like(&self, n: i64) -> Self {
        n as f64
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn is_zero_s(&self) -> bool {
        self.abs() < 1e-12
    }
    fn approx(&self) -> f64 {
        *self
    }
}
