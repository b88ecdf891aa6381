//! Recognition of `r = cos²(mπ/n)`, the periodicity test shared by double points,
//! Möbius compositions and zero-drift walks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{to_float, BigFloat, ExactNumber};

/// Tolerance for accepting `θ/π = m/n` numerically.
const CF_TOLERANCE: f64 = 1e-30;

/// How a periodic verdict was reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recognition {
    /// Rational ratio: only `2r - 1 ∈ {0, ±1/2, ±1}` can be a rational cosine of a rational angle.
    Niven,
    /// Continued-fraction match of `θ/π`; `exact` records the Chebyshev check `T_n(2r-1) = 1` when available.
    ContinuedFraction { residual: f64, exact: Option<bool> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CosSquared {
    /// `r = cos²(mπ/n)` with `n` minimal.
    Periodic { n: u32, m: u32, method: Recognition },
    /// `r = 1`: the angle vanishes.
    DegenerateIdentity,
    /// `r ∉ [0, 1]` or a certified non-root-of-unity.
    Aperiodic { reason: String },
    /// In `[0, 1]` but no match with `n ≤ n_max`.
    NoPeriodUpTo { n_max: u32 },
}

impl CosSquared {
    pub fn period(&self) -> Option<u32> {
        match self {
            CosSquared::Periodic { n, .. } => Some(*n),
            _ => None,
        }
    }
}

/// Chebyshev polynomial `T_n(c)`.
pub fn chebyshev_t(n: u32, c: &ExactNumber) -> ExactNumber {
    let mut prev = ExactNumber::one();
    if n == 0 {
        return prev;
    }
    let mut cur = c.clone();
    let two_c = c * &ExactNumber::from_int(2);
    for _ in 1..n {
        let next = &(&two_c * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Decides whether `r = cos²(mπ/n)` for some `n ≤ n_max`.
pub fn recognize_cos_squared(r: &ExactNumber, n_max: u32, digits: u32) -> CosSquared {
    let one = ExactNumber::one();
    if r.is_negative() || (r - &one).is_positive() {
        return CosSquared::Aperiodic {
            reason: format!("ratio {r} outside [0, 1]"),
        };
    }
    if r == &one {
        return CosSquared::DegenerateIdentity;
    }
    if let Some(q) = r.as_rational() {
        return niven(q, n_max);
    }
    let approx = to_float(r, digits + 10);
    match cf_match(&approx, n_max, digits) {
        Some((n, m, residual)) => {
            let c = &(r * &ExactNumber::from_int(2)) - &one;
            let exact = chebyshev_t(n, &c) == one;
            if exact {
                CosSquared::Periodic {
                    n,
                    m,
                    method: Recognition::ContinuedFraction {
                        residual,
                        exact: Some(true),
                    },
                }
            } else {
                CosSquared::Aperiodic {
                    reason: format!("numeric match {m}/{n} rejected by exact Chebyshev check"),
                }
            }
        }
        None => CosSquared::NoPeriodUpTo { n_max },
    }
}

/// Floating-point variant: numeric recognition only.
pub fn recognize_cos_squared_float(r: &BigFloat, n_max: u32) -> CosSquared {
    let one = r.int_like_one();
    if r.signum() < 0 || r.sub(&one).signum() > 0 {
        return CosSquared::Aperiodic {
            reason: format!("ratio {} outside [0, 1]", r.to_fixed(12)),
        };
    }
    if r.sub(&one).is_zero() {
        return CosSquared::DegenerateIdentity;
    }
    match cf_match(r, n_max, r.digits()) {
        Some((n, m, residual)) => CosSquared::Periodic {
            n,
            m,
            method: Recognition::ContinuedFraction {
                residual,
                exact: None,
            },
        },
        None => CosSquared::NoPeriodUpTo { n_max },
    }
}

impl BigFloat {
    fn int_like_one(&self) -> BigFloat {
        BigFloat::from_i64(1, self.digits()).with_eps_digits(self.eps_digits())
    }
}

fn niven(r: &BigRational, n_max: u32) -> CosSquared {
    let c = r * BigRational::from_integer(BigInt::from(2)) - BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let n = if c == -BigRational::one() {
        2
    } else if c == -half.clone() {
        3
    } else if c.is_zero() {
        4
    } else if c == half {
        6
    } else {
        return CosSquared::Aperiodic {
            reason: format!("2r-1 = {c} is not a rational cosine of a rational angle"),
        };
    };
    if n > n_max {
        return CosSquared::NoPeriodUpTo { n_max };
    }
    CosSquared::Periodic {
        n,
        m: 1,
        method: Recognition::Niven,
    }
}

/// Continued-fraction search for `θ/π = m/n`, `θ = arccos(√r)`.
fn cf_match(r: &BigFloat, n_max: u32, digits: u32) -> Option<(u32, u32, f64)> {
    let work = digits.max(50);
    let rr = BigFloat::from_rational(&r.to_rational()?, work);
    let theta = rr.sqrt().acos();
    let t = theta.div(&BigFloat::pi(work));
    let t_rat = t.to_rational()?;
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut x = t_rat.clone();
    for _ in 0..64 {
        let a = x.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > BigInt::from(n_max) {
            return None;
        }
        let conv = BigRational::new(h2.clone(), k2.clone());
        let resid = (&t_rat - &conv).abs();
        let resid_f = super::exact::rational_to_f64(&resid);
        if resid_f < CF_TOLERANCE && !k2.is_zero() {
            let n: u32 = k2.try_into().ok()?;
            let m: u32 = h2.try_into().ok()?;
            return Some((n, m, resid_f));
        }
        let frac = &x - BigRational::from_integer(a);
        if frac.is_zero() {
            return None;
        }
        x = frac.recip();
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
    }
    None
}
