//! Projective points, the two switches and the QRT step.
//!
//! Each coordinate lives on its own projective line, so a switch whose partner root escapes to
//! infinity returns `P1::Infinity` instead of failing.

use std::fmt;

use crate::error::{QrtError, Result};
use crate::numbers::{BigFloat, ExactNumber, NumberError, Scalar, TowerContext};

use super::Biquadratic;

/// A point of the projective line.
#[derive(Clone, Debug, PartialEq)]
pub enum P1<S = ExactNumber> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> P1<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            P1::Finite(v) => Some(v),
            P1::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, P1::Infinity)
    }

    /// Chordal distance on the Riemann sphere, in `f64`.
    pub fn chordal(&self, o: &Self) -> f64 {
        match (self, o) {
            (P1::Infinity, P1::Infinity) => 0.0,
            (P1::Finite(a), P1::Infinity) | (P1::Infinity, P1::Finite(a)) => {
                1.0 / (1.0 + a.approx().powi(2)).sqrt()
            }
            (P1::Finite(a), P1::Finite(b)) => {
                let d = a.minus(b).approx().abs();
                d / ((1.0 + a.approx().powi(2)).sqrt() * (1.0 + b.approx().powi(2)).sqrt())
            }
        }
    }
}

impl<S: fmt::Display> fmt::Display for P1<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1::Finite(v) => v.fmt(f),
            P1::Infinity => f.write_str("inf"),
        }
    }
}

/// A point of `P¹ × P¹`, normally on some curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint<S = ExactNumber> {
    pub x: P1<S>,
    pub y: P1<S>,
}

impl<S: Scalar> CurvePoint<S> {
    pub fn new(x: S, y: S) -> Self {
        CurvePoint {
            x: P1::Finite(x),
            y: P1::Finite(y),
        }
    }

    /// Larger chordal distance of the two coordinates.
    pub fn distance(&self, o: &Self) -> f64 {
        self.x.chordal(&o.x).max(self.y.chordal(&o.y))
    }

    /// `|Q(p)|` after homogenizing the infinite coordinates.
    pub fn residual(&self, q: &Biquadratic<S>) -> f64 {
        let (a, b, c) = q.y_fiber(&self.x);
        let v = match &self.y {
            P1::Finite(y) => a.times(&y.times(y)).plus(&b.times(y)).plus(&c),
            P1::Infinity => a,
        };
        v.approx().abs()
    }
}

impl<S: fmt::Display> fmt::Display for CurvePoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Second root of `a z² + b z + c` given the root `z`.
fn partner<S: Scalar>(a: &S, b: &S, c: &S, z: &P1<S>, what: &str) -> Result<P1<S>> {
    let (az, bz, cz) = (a.is_zero_s(), b.is_zero_s(), c.is_zero_s());
    if az && bz && cz {
        return Err(QrtError::LineComponent(format!(
            "{what} fiber vanishes identically"
        )));
    }
    match z {
        P1::Finite(z) => {
            if !az {
                Ok(P1::Finite(b.over(a).negate().minus(z)))
            } else if !bz {
                Ok(P1::Infinity)
            } else {
                Err(QrtError::LineComponent(format!(
                    "{what} fiber is constant; point is off the curve"
                )))
            }
        }
        P1::Infinity => {
            if !az {
                Err(QrtError::Invalid(format!(
                    "point at infinity is not on the curve ({what} fiber)"
                )))
            } else if !bz {
                Ok(P1::Finite(c.over(b).negate()))
            } else {
                Ok(P1::Infinity)
            }
        }
    }
}

/// `v`: keeps `x`, replaces `y` by the other root of `Q(x, ·)`.
pub fn vertical_switch<S: Scalar>(q: &Biquadratic<S>, p: &CurvePoint<S>) -> Result<CurvePoint<S>> {
    let (a, b, c) = q.y_fiber(&p.x);
    Ok(CurvePoint {
        x: p.x.clone(),
        y: partner(&a, &b, &c, &p.y, "vertical")?,
    })
}

/// `h`: keeps `y`, replaces `x` by the other root of `Q(·, y)`.
pub fn horizontal_switch<S: Scalar>(
    q: &Biquadratic<S>,
    p: &CurvePoint<S>,
) -> Result<CurvePoint<S>> {
    let (a, b, c) = q.x_fiber(&p.y);
    Ok(CurvePoint {
        x: partner(&a, &b, &c, &p.x, "horizontal")?,
        y: p.y.clone(),
    })
}

/// `δ = v∘h` (horizontal switch first).
pub fn qrt_step<S: Scalar>(q: &Biquadratic<S>, p: &CurvePoint<S>) -> Result<CurvePoint<S>> {
    vertical_switch(q, &horizontal_switch(q, p)?)
}

/// `δ⁻¹ = h∘v`.
pub fn qrt_step_inverse<S: Scalar>(q: &Biquadratic<S>, p: &CurvePoint<S>) -> Result<CurvePoint<S>> {
    horizontal_switch(q, &vertical_switch(q, p)?)
}

/// `p, δ(p), …, δⁿ(p)`.
pub fn orbit<S: Scalar>(
    q: &Biquadratic<S>,
    p: &CurvePoint<S>,
    n: usize,
) -> Result<Vec<CurvePoint<S>>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(p.clone());
    for _ in 0..n {
        let next = qrt_step(q, out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Smallest `k ≤ n` with `δᵏ(p)` within `tol` of `p` (chordal metric), if any.
pub fn orbit_closes<S: Scalar>(
    q: &Biquadratic<S>,
    p: &CurvePoint<S>,
    n: usize,
    tol: f64,
) -> Result<Option<usize>> {
    let mut cur = p.clone();
    for k in 1..=n {
        cur = qrt_step(q, &cur)?;
        if cur.distance(p) < tol {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Roots of a fiber: exact when the discriminant is a square in the tower, floating otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberRoots {
    Exact(Vec<P1<ExactNumber>>),
    Float(Vec<P1<BigFloat>>),
}

impl FiberRoots {
    pub fn len(&self) -> usize {
        match self {
            FiberRoots::Exact(v) => v.len(),
            FiberRoots::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// All real `y` (with multiplicity, `∞` included) with `Q(x, y) = 0`.
///
/// Square roots are taken through `ctx`, adjoining one tower level if needed; if the tower
/// cannot absorb the root the answer falls back to floating values at `digits` digits.
pub fn solve_fiber(
    q: &Biquadratic,
    x: &P1<ExactNumber>,
    ctx: &TowerContext,
    digits: u32,
) -> Result<FiberRoots> {
    let (a, b, c) = q.y_fiber(x);
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Err(QrtError::EntireFiber(x.to_string()));
    }
    if a.is_zero() {
        let r = if b.is_zero() {
            vec![P1::Infinity, P1::Infinity]
        } else {
            vec![P1::Finite(-(&c / &b)), P1::Infinity]
        };
        return Ok(FiberRoots::Exact(r));
    }
    let disc = &(&b * &b) - &(&ExactNumber::from_int(4) * &(&a * &c));
    if disc.is_negative() {
        return Ok(FiberRoots::Exact(Vec::new()));
    }
    let two_a = &a * &ExactNumber::from_int(2);
    let root = [&a, &b, &c]
        .into_iter()
        .try_for_each(|v| ctx.absorb(v))
        .and_then(|_| ctx.sqrt(&disc));
    match root {
        Ok(s) => {
            let r1 = &(&(-&b) + &s) / &two_a;
            let r2 = &(&(-&b) - &s) / &two_a;
            Ok(FiberRoots::Exact(vec![P1::Finite(r1), P1::Finite(r2)]))
        }
        Err(NumberError::IncompatibleTowers | NumberError::DepthExceeded(_)) => {
            let qf = q.to_float(digits);
            let xf = match x {
                P1::Finite(v) => P1::Finite(crate::numbers::to_float(v, digits + 5)),
                P1::Infinity => P1::Infinity,
            };
            Ok(FiberRoots::Float(solve_fiber_float(&qf, &xf)?))
        }
        Err(e) => Err(e.into()),
    }
}

/// Real roots `y` of `Q(x, ·)` over floating coefficients.
pub fn solve_fiber_float(q: &Biquadratic<BigFloat>, x: &P1<BigFloat>) -> Result<Vec<P1<BigFloat>>> {
    let (a, b, c) = q.y_fiber(x);
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Err(QrtError::EntireFiber(x.to_string()));
    }
    if a.is_zero() {
        return Ok(if b.is_zero() {
            vec![P1::Infinity, P1::Infinity]
        } else {
            vec![P1::Finite(c.div(&b).neg()), P1::Infinity]
        });
    }
    let four = a.int_like(4);
    let disc = b.mul(&b).sub(&four.mul(&a).mul(&c));
    if disc.signum() < 0 {
        return Ok(Vec::new());
    }
    let s = if disc.signum() == 0 {
        disc.zero_like()
    } else {
        disc.sqrt()
    };
    let two_a = a.add(&a);
    Ok(vec![
        P1::Finite(b.neg().add(&s).div(&two_a)),
        P1::Finite(b.neg().sub(&s).div(&two_a)),
    ])
}
