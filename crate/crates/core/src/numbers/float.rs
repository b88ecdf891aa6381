//! Arbitrary-precision floating values with an explicit zero threshold.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat as AFloat, Consts, RoundingMode, Sign as ASign, Word};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::exact::ExactNumber;

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Mantissa bits for `digits` decimal digits plus guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    let b = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
    b.div_ceil(64) * 64
}

/// Floating value carrying its precision `digits` and zero threshold `10^(-eps_digits)`.
#[derive(Clone)]
pub struct BigFloat {
    v: AFloat,
    digits: u32,
    eps_digits: u32,
}

impl BigFloat {
    fn wrap(&self, v: AFloat) -> Self {
        BigFloat {
            v,
            digits: self.digits,
            eps_digits: self.eps_digits,
        }
    }

    fn bits(&self) -> usize {
        bits_for_digits(self.digits)
    }

    fn join(&self, o: &Self) -> (usize, u32, u32) {
        let digits = self.digits.max(o.digits);
        (
            bits_for_digits(digits),
            digits,
            self.eps_digits.max(o.eps_digits),
        )
    }

    pub fn from_i64(n: i64, digits: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), digits)
    }

    pub fn from_f64(x: f64, digits: u32) -> Self {
        BigFloat {
            v: AFloat::from_f64(x, bits_for_digits(digits)),
            digits,
            eps_digits: digits / 2,
        }
    }

    fn from_bigint(n: &BigInt, digits: u32) -> Self {
        let (sign, words) = n.to_u64_digits();
        let v = if words.is_empty() {
            AFloat::from_word(0, bits_for_digits(digits))
        } else {
            let m: Vec<Word> = words.iter().map(|&w| w as Word).collect();
            let s = if sign == Sign::Minus {
                ASign::Neg
            } else {
                ASign::Pos
            };
            let e = (64 * m.len()) as i32;
            AFloat::from_words(&m, s, e)
        };
        BigFloat {
            v,
            digits,
            eps_digits: digits / 2,
        }
    }

    /// Rounds a rational to `digits` decimal digits of relative precision.
    pub fn from_rational(r: &BigRational, digits: u32) -> Self {
        let n = Self::from_bigint(r.numer(), digits);
        let d = Self::from_bigint(r.denom(), digits);
        n.div(&d)
    }

    /// Overrides the zero threshold to `10^(-eps_digits)`.
    pub fn with_eps_digits(mut self, eps_digits: u32) -> Self {
        self.eps_digits = eps_digits;
        self
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn eps_digits(&self) -> u32 {
        self.eps_digits
    }

    pub fn add(&self, o: &Self) -> Self {
        let (p, d, e) = self.join(o);
        BigFloat {
            v: self.v.add(&o.v, p, RM),
            digits: d,
            eps_digits: e,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let (p, d, e) = self.join(o);
        BigFloat {
            v: self.v.sub(&o.v, p, RM),
            digits: d,
            eps_digits: e,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (p, d, e) = self.join(o);
        BigFloat {
            v: self.v.mul(&o.v, p, RM),
            digits: d,
            eps_digits: e,
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        let (p, d, e) = self.join(o);
        BigFloat {
            v: self.v.div(&o.v, p, RM),
            digits: d,
            eps_digits: e,
        }
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.v.neg())
    }

    pub fn abs(&self) -> Self {
        self.wrap(self.v.abs())
    }

    pub fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt(self.bits(), RM))
    }

    pub fn acos(&self) -> Self {
        let p = self.bits();
        self.wrap(with_consts(|cc| self.v.acos(p, RM, cc)))
    }

    pub fn pi(digits: u32) -> Self {
        let p = bits_for_digits(digits);
        BigFloat {
            v: with_consts(|cc| cc.pi(p, RM)),
            digits,
            eps_digits: digits / 2,
        }
    }

    pub fn is_nan(&self) -> bool {
        self.v.is_nan()
    }

    /// Exact rational value of the binary floating number.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.v.is_zero() {
            return Some(BigRational::zero());
        }
        let (words, _, sign, exp, _) = self.v.as_raw_parts()?;
        let mut m = BigInt::zero();
        for (i, w) in words.iter().enumerate() {
            m += BigInt::from(*w) << (64 * i);
        }
        if sign == ASign::Neg {
            m = -m;
        }
        let shift = exp as i64 - 64 * words.len() as i64;
        Some(if shift >= 0 {
            BigRational::from_integer(m << shift as usize)
        } else {
            BigRational::new(m, BigInt::one() << (-shift) as usize)
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational()
            .map_or(f64::NAN, |r| super::exact::rational_to_f64(&r))
    }

    /// Threshold value `10^(-eps_digits)`.
    pub fn eps(&self) -> Self {
        let r = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(self.eps_digits));
        BigFloat::from_rational(&r, self.digits).with_eps_digits(self.eps_digits)
    }

    /// `|x| - ε`: negative means "treated as zero", and the magnitude is the safety margin.
    pub fn zero_margin(&self) -> f64 {
        self.abs().sub(&self.eps()).to_f64()
    }

    /// Zero test against `ε = 10^(-eps_digits)`.
    pub fn is_zero(&self) -> bool {
        if self.v.is_zero() {
            return true;
        }
        // Compare binary exponents first; only borderline cases need the exact comparison.
        let e = self.v.exponent().unwrap_or(0) as f64;
        let lim = -(self.eps_digits as f64) * std::f64::consts::LOG2_10;
        if e < lim - 2.0 {
            return true;
        }
        if e > lim + 2.0 {
            return false;
        }
        self.abs().v.cmp(&self.eps().v).is_some_and(|c| c < 0)
    }

    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.v.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Decimal rendering with `frac` digits after the point (exact rounding of the binary value).
    pub fn to_fixed(&self, frac: u32) -> String {
        let Some(r) = self.to_rational() else {
            return "NaN".into();
        };
        let scale = BigInt::from(10u32).pow(frac);
        let scaled = r * BigRational::from_integer(scale);
        let rounded = scaled.round().to_integer();
        let neg = rounded.is_negative();
        let digits = rounded.abs().to_string();
        let digits = if digits.len() <= frac as usize {
            format!("{}{}", "0".repeat(frac as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let split = digits.len() - frac as usize;
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&digits[..split]);
        if frac > 0 {
            out.push('.');
            out.push_str(&digits[split..]);
        }
        out
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let c = self.v.cmp(&other.v)?;
        Some(c.cmp(&0))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fixed(self.digits))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fixed(self.digits.min(30)))
    }
}

/// Approximates `x` with absolute error below `10^(-digits)`.
pub fn to_float(x: &ExactNumber, digits: u32) -> BigFloat {
    // Guard digits cover cancellation between large conjugate terms.
    let guard = 20 + (x.height_bits() as f64 * 0.31) as u32 * 2 + 10 * x.depth() as u32;
    let work = digits + guard;
    eval(x, work).with_digits(digits)
}

impl BigFloat {
    fn with_digits(mut self, digits: u32) -> Self {
        // Keep the extra mantissa bits: rounding them away could only add error.
        self.digits = self.digits.max(digits);
        self.eps_digits = digits / 2;
        self
    }
}

fn eval(x: &ExactNumber, work: u32) -> BigFloat {
    match x.components() {
        None => BigFloat::from_rational(x.as_rational().expect("rational"), work),
        Some((lo, hi, s)) => {
            let root = eval(&s, work).sqrt();
            eval(&lo, work).add(&eval(&hi, work).mul(&root))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{parse_number, TowerContext};

    #[test]
    fn rational_round_trip() {
        let r = BigRational::new(BigInt::from(3), BigInt::from(4));
        let f = BigFloat::from_rational(&r, 10);
        assert_eq!(f.to_fixed(10), "0.7500000000");
        assert_eq!(f.to_rational().unwrap(), r);
        assert_eq!(BigFloat::from_i64(-12345, 20).to_f64(), -12345.0);
    }

    #[test]
    fn sqrt_seven_digits() {
        let ctx = TowerContext::new();
        let v = to_float(&parse_number("sqrt(7)", &ctx).unwrap(), 10);
        assert_eq!(v.to_fixed(10), "2.6457513111");
    }

    #[test]
    fn nested_root_squares_back() {
        let ctx = TowerContext::new();
        let x = parse_number("sqrt(sqrt(5)-2)", &ctx).unwrap();
        let v = to_float(&x, 30);
        let s = to_float(&parse_number("sqrt(5)-2", &ctx).unwrap(), 40);
        let err = v.mul(&v).sub(&s).abs().to_f64();
        assert!(err < 1e-28, "{err}");
    }

    #[test]
    fn zero_threshold() {
        let tiny = BigFloat::from_rational(
            &BigRational::new(BigInt::one(), BigInt::from(10u32).pow(30)),
            50,
        );
        assert!(tiny.is_zero());
        let small = BigFloat::from_rational(
            &BigRational::new(BigInt::one(), BigInt::from(10u32).pow(20)),
            50,
        );
        assert!(!small.is_zero());
        assert!(small.zero_margin() > 0.0);
    }

    #[test]
    fn acos_and_pi() {
        let h =
            BigFloat::from_rational(&BigRational::new(BigInt::one(), BigInt::from(2)), 50).acos();
        let third = BigFloat::pi(50).div(&BigFloat::from_i64(3, 50));
        assert!(h.sub(&third).abs().to_f64() < 1e-45);
    }
}
