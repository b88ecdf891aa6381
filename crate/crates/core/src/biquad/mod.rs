//! Biquadratic curves `Q(x, y) = Σ a_ij x^i y^j` (`0 ≤ i, j ≤ 2`).
//!
//! Index convention: the first index is the power of `x`, the second the power of `y`.

mod io;
mod switch;

use std::fmt;

use serde::Serialize;

use crate::error::{QrtError, Result};
use crate::numbers::{to_float, BigFloat, ExactNumber, Scalar};
use crate::poly::{eisenstein_invariants, multiplicity_pattern, MultiplicityPattern, Poly};

pub use io::{curve_from_json, curve_to_json, parse_matrix, CurveFile};
pub use switch::{
    horizontal_switch, orbit, orbit_closes, qrt_step, qrt_step_inverse, solve_fiber,
    solve_fiber_float, vertical_switch, CurvePoint, FiberRoots, P1,
};

/// Coefficient matrix of a biquadratic polynomial.
#[derive(Clone, PartialEq)]
pub struct Biquadratic<S = ExactNumber> {
    a: [[S; 3]; 3],
}

impl<S: Scalar> Biquadratic<S> {
    /// Wraps `a[i][j]` (coefficient of `x^i y^j`); rejects the zero matrix.
    pub fn new(a: [[S; 3]; 3]) -> Result<Self> {
        if a.iter().flatten().all(|v| v.is_zero_s()) {
            return Err(QrtError::ZeroCurve);
        }
        Ok(Biquadratic { a })
    }

    pub fn a(&self, i: usize, j: usize) -> &S {
        &self.a[i][j]
    }

    pub fn matrix(&self) -> &[[S; 3]; 3] {
        &self.a
    }

    /// `Q(x, y)` at a finite point.
    pub fn eval(&self, x: &S, y: &S) -> S {
        let xs = [x.int_like(1), x.clone(), x.times(x)];
        let ys = [y.int_like(1), y.clone(), y.times(y)];
        let mut acc = x.zero_like();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc.plus(&self.a[i][j].times(&xs[i]).times(&ys[j]));
            }
        }
        acc
    }

    /// Coefficients `(a, b, c)` of `Q` as a quadratic in `y` at fixed `x`; for `x = ∞` the
    /// leading coefficients in `x`.
    pub fn y_fiber(&self, x: &P1<S>) -> (S, S, S) {
        let col = |j: usize| match x {
            P1::Finite(x) => self.a[0][j]
                .plus(&self.a[1][j].times(x))
                .plus(&self.a[2][j].times(&x.times(x))),
            P1::Infinity => self.a[2][j].clone(),
        };
        (col(2), col(1), col(0))
    }

    /// Coefficients `(ã, b̃, c̃)` of `Q` as a quadratic in `x` at fixed `y`.
    pub fn x_fiber(&self, y: &P1<S>) -> (S, S, S) {
        let row = |i: usize| match y {
            P1::Finite(y) => self.a[i][0]
                .plus(&self.a[i][1].times(y))
                .plus(&self.a[i][2].times(&y.times(y))),
            P1::Infinity => self.a[i][2].clone(),
        };
        (row(2), row(1), row(0))
    }
}

impl Biquadratic<ExactNumber> {
    /// Builds a curve from integer entries `a[i][j]`.
    pub fn from_ints(a: [[i64; 3]; 3]) -> Result<Self> {
        Self::new(a.map(|r| r.map(ExactNumber::from_int)))
    }

    /// The six coefficient polynomials `(a(x), b(x), c(x), ã(y), b̃(y), c̃(y))`.
    pub fn coefficient_polys(&self) -> CoefficientPolys {
        let col = |j: usize| Poly::with_nominal((0..3).map(|i| self.a[i][j].clone()).collect(), 2);
        let row = |i: usize| Poly::with_nominal((0..3).map(|j| self.a[i][j].clone()).collect(), 2);
        CoefficientPolys {
            a: col(2),
            b: col(1),
            c: col(0),
            at: row(2),
            bt: row(1),
            ct: row(0),
        }
    }

    /// `(𝒟_{Q_y}(x), 𝒟_{Q_x}(y))`, both as quartic forms.
    pub fn discriminant_quartics(&self) -> (Poly, Poly) {
        let p = self.coefficient_polys();
        let four = ExactNumber::from_int(4);
        let dy = p.b.mul(&p.b).sub(&p.a.mul(&p.c).scale(&four)).nominal(4);
        let dx =
            p.bt.mul(&p.bt)
                .sub(&p.at.mul(&p.ct).scale(&four))
                .nominal(4);
        (dy, dx)
    }

    /// Branch-point patterns `(d₁, d₂)` of the two projections.
    pub fn critical_patterns(&self) -> (MultiplicityPattern, MultiplicityPattern) {
        let (dy, dx) = self.discriminant_quartics();
        (multiplicity_pattern(&dy), multiplicity_pattern(&dx))
    }

    /// `D_C, E_C, F_C, J`, asserting that both discriminant quartics share their invariants.
    pub fn curve_invariants(&self) -> Result<CurveInvariants> {
        let (dy, dx) = self.discriminant_quartics();
        let (d1, e1) = eisenstein_invariants(&dy);
        let (d2, e2) = eisenstein_invariants(&dx);
        if d1 != d2 || e1 != e2 {
            return Err(QrtError::Internal(format!(
                "discriminant quartics disagree: D = {d1} vs {d2}, E = {e1} vs {e2}"
            )));
        }
        let core = &d1.pow(3) - &(&ExactNumber::from_int(27) * &e1.pow(2));
        let f = &ExactNumber::from_int(256) * &core;
        let j = if core.is_zero() {
            None
        } else {
            Some(&d1.pow(3) / &core)
        };
        Ok(CurveInvariants { d: d1, e: e1, f, j })
    }

    /// `det(a_ij)`, which equals `det(M_Q)`.
    pub fn det(&self) -> ExactNumber {
        det3(&self.a)
    }

    /// `M_Q`: rows `(a₂ⱼ; a₁ⱼ; a₀ⱼ)`, columns `j = 2, 1, 0`.
    pub fn m_q(&self) -> [[ExactNumber; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.a[2 - r][2 - c].clone()))
    }

    pub fn transform(&self, op: &Transform) -> Biquadratic {
        let a = &self.a;
        let out: [[ExactNumber; 3]; 3] = match op {
            Transform::TranslateX(t) => {
                let cols: Vec<Vec<ExactNumber>> = (0..3)
                    .map(|j| shift3([&a[0][j], &a[1][j], &a[2][j]], t))
                    .collect();
                std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
            }
            Transform::TranslateY(t) => {
                let rows: Vec<Vec<ExactNumber>> = (0..3)
                    .map(|i| shift3([&a[i][0], &a[i][1], &a[i][2]], t))
                    .collect();
                std::array::from_fn(|i| std::array::from_fn(|j| rows[i][j].clone()))
            }
            Transform::ScaleX(b) => {
                std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] * &b.pow(i as u32)))
            }
            Transform::ScaleY(b) => {
                std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] * &b.pow(j as u32)))
            }
            Transform::InvertX => {
                std::array::from_fn(|i| std::array::from_fn(|j| a[2 - i][j].clone()))
            }
            Transform::InvertY => {
                std::array::from_fn(|i| std::array::from_fn(|j| a[i][2 - j].clone()))
            }
            Transform::SwapXY => std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone())),
        };
        Biquadratic { a: out }
    }

    /// `Q(y, x)`.
    pub fn swapped(&self) -> Biquadratic {
        self.transform(&Transform::SwapXY)
    }

    pub fn scaled(&self, k: &ExactNumber) -> Biquadratic {
        Biquadratic {
            a: self.a.clone().map(|r| r.map(|v| &v * k)),
        }
    }

    /// Whether `a₁₀ = a₀₁ = a₂₁ = a₁₂ = 0`, i.e. `Q(−x, −y) = Q(x, y)`.
    pub fn is_centrally_symmetric(&self) -> bool {
        [(1, 0), (0, 1), (2, 1), (1, 2)]
            .iter()
            .all(|&(i, j)| self.a[i][j].is_zero())
    }

    /// All entries as a float curve with `digits` decimal digits.
    pub fn to_float(&self, digits: u32) -> Biquadratic<BigFloat> {
        Biquadratic {
            a: self.a.clone().map(|r| r.map(|v| to_float(&v, digits + 5))),
        }
    }

    pub fn to_f64(&self) -> Biquadratic<f64> {
        Biquadratic {
            a: self.a.clone().map(|r| r.map(|v| v.to_f64())),
        }
    }

    /// `Q(x, y)` at a projective point, homogenized in each variable.
    pub fn eval_p1(&self, x: &P1<ExactNumber>, y: &P1<ExactNumber>) -> ExactNumber {
        let (a, b, c) = self.y_fiber(x);
        match y {
            P1::Finite(y) => &(&(&a * &(y * y)) + &(&b * y)) + &c,
            P1::Infinity => a,
        }
    }
}

/// `det` of a 3×3 matrix by cofactor expansion.
pub fn det3(m: &[[ExactNumber; 3]; 3]) -> ExactNumber {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1])
    };
    &(&(&m[0][0] * &minor(1, 2, 1, 2)) - &(&m[0][1] * &minor(1, 2, 0, 2)))
        + &(&m[0][2] * &minor(1, 2, 0, 1))
}

/// Coefficients of `p(z + t)` for `p = c₀ + c₁z + c₂z²`.
fn shift3(c: [&ExactNumber; 3], t: &ExactNumber) -> Vec<ExactNumber> {
    let two = ExactNumber::from_int(2);
    vec![
        &(c[0] + &(c[1] * t)) + &(c[2] * &(t * t)),
        c[1] + &(&two * &(c[2] * t)),
        c[2].clone(),
    ]
}

/// The coefficient polynomials of a biquadratic in both orientations.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPolys {
    /// `Q = a(x)y² + b(x)y + c(x)`
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    /// `Q = ã(y)x² + b̃(y)x + c̃(y)`
    pub at: Poly,
    pub bt: Poly,
    pub ct: Poly,
}

/// Projective invariants of the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveInvariants {
    pub d: ExactNumber,
    pub e: ExactNumber,
    /// `256(D³ − 27E²)`
    pub f: ExactNumber,
    /// `D³/(D³ − 27E²)`, undefined on singular curves.
    pub j: Option<ExactNumber>,
}

impl CurveInvariants {
    pub fn is_smooth(&self) -> bool {
        !self.f.is_zero()
    }
}

/// Coordinate changes acting on biquadratics.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "op", content = "by", rename_all = "kebab-case")]
pub enum Transform {
    TranslateX(#[serde(serialize_with = "ser_num")] ExactNumber),
    TranslateY(#[serde(serialize_with = "ser_num")] ExactNumber),
    ScaleX(#[serde(serialize_with = "ser_num")] ExactNumber),
    ScaleY(#[serde(serialize_with = "ser_num")] ExactNumber),
    InvertX,
    InvertY,
    SwapXY,
}

fn ser_num<S: serde::Serializer>(v: &ExactNumber, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl<S: Scalar + fmt::Display> fmt::Display for Biquadratic<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in (0..3).rev() {
            for j in (0..3).rev() {
                let v = &self.a[i][j];
                if v.is_zero_s() {
                    continue;
                }
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                let mono = match (i, j) {
                    (0, 0) => String::new(),
                    _ => {
                        let p = |v: &str, e: usize| match e {
                            0 => String::new(),
                            1 => v.to_string(),
                            _ => format!("{v}^{e}"),
                        };
                        let parts: Vec<String> = [p("x", i), p("y", j)]
                            .into_iter()
                            .filter(|s| !s.is_empty())
                            .collect();
                        format!("*{}", parts.join("*"))
                    }
                };
                write!(f, "({v}){mono}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Biquadratic<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Biquadratic").field("a", &self.a).finish()
    }
}
