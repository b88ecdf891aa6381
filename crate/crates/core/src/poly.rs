//! Univariate polynomials over [`ExactNumber`], square-free structure and quartic invariants.
//!
//! A [`Poly`] remembers a nominal degree next to its coefficients. For binary quartics the
//! gap between nominal and actual degree is the multiplicity of the root at infinity.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::numbers::ExactNumber;

/// Polynomial with ascending coefficients `c₀ … c_d` and a nominal degree bound.
#[derive(Clone)]
pub struct Poly {
    c: Vec<ExactNumber>,
    nominal: usize,
}

impl Poly {
    /// Builds a polynomial; the nominal degree is the length of `coeffs` minus one.
    pub fn new(coeffs: Vec<ExactNumber>) -> Self {
        let nominal = coeffs.len().saturating_sub(1);
        Self::with_nominal(coeffs, nominal)
    }

    /// Builds a polynomial regarded as a form of degree `nominal` (leading zeros allowed).
    pub fn with_nominal(mut coeffs: Vec<ExactNumber>, nominal: usize) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let nominal = nominal.max(coeffs.len().saturating_sub(1));
        Poly { c: coeffs, nominal }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&n| ExactNumber::from_int(n)).collect())
    }

    pub fn zero() -> Self {
        Poly {
            c: Vec::new(),
            nominal: 0,
        }
    }

    pub fn constant(v: ExactNumber) -> Self {
        Self::new(vec![v])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Actual degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn nominal_degree(&self) -> usize {
        self.nominal
    }

    /// Returns a copy regarded as a form of degree `n` (never below the actual degree).
    pub fn nominal(mut self, n: usize) -> Self {
        self.nominal = n.max(self.c.len().saturating_sub(1));
        self
    }

    /// Coefficient of `x^i` (zero beyond the stored range).
    pub fn coeff(&self, i: usize) -> ExactNumber {
        self.c.get(i).cloned().unwrap_or_else(ExactNumber::zero)
    }

    pub fn coeffs(&self) -> &[ExactNumber] {
        &self.c
    }

    /// Coefficients `c₀ … c_nominal`, zero padded.
    pub fn padded(&self) -> Vec<ExactNumber> {
        (0..=self.nominal).map(|i| self.coeff(i)).collect()
    }

    pub fn leading(&self) -> ExactNumber {
        self.c.last().cloned().unwrap_or_else(ExactNumber::zero)
    }

    pub fn eval(&self, x: &ExactNumber) -> ExactNumber {
        let mut acc = ExactNumber::zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &ExactNumber::from_int(i as i64))
            .collect();
        Poly::new(c)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect();
        Poly::with_nominal(c, self.nominal.max(o.nominal))
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect();
        Poly::with_nominal(c, self.nominal.max(o.nominal))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero().nominal(self.nominal + o.nominal);
        }
        let mut c = vec![ExactNumber::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        Poly::with_nominal(c, self.nominal + o.nominal)
    }

    pub fn scale(&self, k: &ExactNumber) -> Poly {
        Poly::with_nominal(self.c.iter().map(|c| c * k).collect(), self.nominal)
    }

    /// Divides by the leading coefficient (zero stays zero).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = &ExactNumber::one() / &self.leading();
        self.scale(&inv)
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = &ExactNumber::one() / &d.leading();
        let mut r = self.c.clone();
        let mut q = vec![ExactNumber::zero(); self.c.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = &r[r.len() - 1] * &lead_inv;
            for (j, dc) in d.c.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&f * dc);
            }
            q[k] = f;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor (zero if both inputs vanish).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.monic(), o.monic());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic().nominal(0)
    }

    /// `p(x + α)`.
    pub fn shift(&self, alpha: &ExactNumber) -> Poly {
        let lin = Poly::new(vec![alpha.clone(), ExactNumber::one()]);
        let mut acc = Poly::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc.nominal(self.nominal)
    }

    /// `p(βx)`.
    pub fn scale_arg(&self, beta: &ExactNumber) -> Poly {
        let mut pw = ExactNumber::one();
        let mut c = Vec::with_capacity(self.c.len());
        for a in &self.c {
            c.push(a * &pw);
            pw = &pw * beta;
        }
        Poly::with_nominal(c, self.nominal)
    }

    /// `x^n p(1/x)` with `n` the nominal degree.
    pub fn reversed(&self) -> Poly {
        Poly::with_nominal(self.padded().into_iter().rev().collect(), self.nominal)
    }

    /// Yun's square-free decomposition: pairs `(f_k, k)` with monic square-free, pairwise
    /// coprime `f_k` of positive degree and `p = lc · Π f_k^k`.
    pub fn square_free(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0);
        let mut c = df.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            k += 1;
        }
        out
    }

    /// Monic `s` and constant `lc` with `self = lc · s²`, if such a factorization exists.
    pub fn square_root(&self) -> Option<(ExactNumber, Poly)> {
        let d = self.degree()?;
        if d % 2 == 1 {
            return None;
        }
        let lc = self.leading();
        let q = self.monic();
        let h = d / 2;
        // Coefficients of s from the top down: s = x^h + s_{h-1}x^{h-1} + …
        let mut s = vec![ExactNumber::zero(); h + 1];
        s[h] = ExactNumber::one();
        let half = ExactNumber::from_ratio(1, 2);
        for k in 1..=h {
            // coefficient of x^{d-k} in s² is 2 s_{h-k} + Σ_{i+j=d-k, i,j > h-k} s_i s_j
            let mut acc = ExactNumber::zero();
            for i in (h - k + 1)..=h {
                let j = d - k - i;
                if j > h - k && j <= h {
                    acc = &acc + &(&s[i] * &s[j]);
                }
            }
            s[h - k] = &(&q.coeff(d - k) - &acc) * &half;
        }
        let s = Poly::new(s);
        if s.mul(&s).sub(&q).is_zero() {
            Some((lc, s))
        } else {
            None
        }
    }

    /// Renders with variable name `var`, highest degree first.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let compound = c.components().is_some();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if !compound => (true, rest.to_string()),
                _ => (false, text),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let body = if compound && i > 0 {
                format!("({body})")
            } else {
                body
            };
            match i {
                0 => out.push_str(&body),
                _ => {
                    if body != "1" {
                        out.push_str(&body);
                        out.push('*');
                    }
                    out.push_str(var);
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        out
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}; nominal {}]", self, self.nominal)
    }
}

/// Root multiplicities of a binary quartic, infinity included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultiplicityPattern {
    Simple,
    DoubleSimple,
    DoubleDouble,
    TripleSimple,
    Quadruple,
    /// The polynomial vanishes identically.
    Undefined,
}

impl MultiplicityPattern {
    /// Pattern from the multiset of multiplicities (any order).
    pub fn from_parts(parts: &[usize]) -> Option<Self> {
        let mut p = parts.to_vec();
        p.sort_unstable_by(|a, b| b.cmp(a));
        Some(match p.as_slice() {
            [1, 1, 1, 1] => Self::Simple,
            [2, 1, 1] => Self::DoubleSimple,
            [2, 2] => Self::DoubleDouble,
            [3, 1] => Self::TripleSimple,
            [4] => Self::Quadruple,
            _ => return None,
        })
    }

    pub fn parts(&self) -> &'static [usize] {
        match self {
            Self::Simple => &[1, 1, 1, 1],
            Self::DoubleSimple => &[2, 1, 1],
            Self::DoubleDouble => &[2, 2],
            Self::TripleSimple => &[3, 1],
            Self::Quadruple => &[4],
            Self::Undefined => &[],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Simple => "(1,1,1,1)",
            Self::DoubleSimple => "(2,1,1)",
            Self::DoubleDouble => "(2,2)",
            Self::TripleSimple => "(3,1)",
            Self::Quadruple => "(4)",
            Self::Undefined => "undefined",
        }
    }
}

impl fmt::Display for MultiplicityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for MultiplicityPattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Multiplicity structure of a form of degree 4, counting `4 − deg p` at infinity.
pub fn multiplicity_pattern(p: &Poly) -> MultiplicityPattern {
    let Some(deg) = p.degree() else {
        return MultiplicityPattern::Undefined;
    };
    assert!(deg <= 4, "multiplicity_pattern expects a quartic form");
    let mut parts = Vec::new();
    if deg < 4 {
        parts.push(4 - deg);
    }
    for (f, k) in p.square_free() {
        for _ in 0..f.degree().unwrap_or(0) {
            parts.push(k);
        }
    }
    MultiplicityPattern::from_parts(&parts).expect("multiplicities of a quartic form sum to 4")
}

/// Eisenstein invariants `(D, E)` of a quartic form `b₄x⁴ + b₃x³ + b₂x² + b₁x + b₀`.
pub fn eisenstein_invariants(p: &Poly) -> (ExactNumber, ExactNumber) {
    let q = |i: usize, d: i64| &p.coeff(i) / &ExactNumber::from_int(d);
    let (a4, a3, a2, a1, a0) = (q(4, 1), q(3, 4), q(2, 6), q(1, 4), q(0, 1));
    let n = ExactNumber::from_int;
    let d = &(&(&a0 * &a4) + &(&n(3) * &(&a2 * &a2))) - &(&n(4) * &(&a1 * &a3));
    let e = &(&(&(&(&a0 * &(&a3 * &a3)) + &(&(&a1 * &a1) * &a4)) - &(&(&a0 * &a2) * &a4))
        - &(&n(2) * &(&(&a1 * &a2) * &a3)))
        + &(&a2 * &(&a2 * &a2));
    (d, e)
}

/// Discriminant of the binary quartic from its invariants: `256(D³ − 27E²)`.
pub fn quartic_discriminant(p: &Poly) -> ExactNumber {
    let (d, e) = eisenstein_invariants(p);
    &ExactNumber::from_int(256) * &(&d.pow(3) - &(&ExactNumber::from_int(27) * &e.pow(2)))
}

/// Outcome of the invariance checks under translation, reversal and scaling.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftInvarianceReport {
    pub d: String,
    pub e: String,
    pub shifted: (String, String),
    pub reversed: (String, String),
    pub scaled: (String, String),
    pub scaled_expected: (String, String),
    pub pass: bool,
}

/// Checks invariance under `x ↦ x + α` and reversal and covariance `(β⁴, β⁶)` under `x ↦ βx`.
pub fn shift_invariance_check(
    p: &Poly,
    alpha: &ExactNumber,
    beta: &ExactNumber,
) -> ShiftInvarianceReport {
    let p = p.clone().nominal(4);
    let (d, e) = eisenstein_invariants(&p);
    let sh = eisenstein_invariants(&p.shift(alpha));
    let rv = eisenstein_invariants(&p.reversed());
    let sc = eisenstein_invariants(&p.scale_arg(beta));
    let expect = (&d * &beta.pow(4), &e * &beta.pow(6));
    let pass = sh == (d.clone(), e.clone()) && rv == (d.clone(), e.clone()) && sc == expect;
    let s = |v: &(ExactNumber, ExactNumber)| (v.0.to_string(), v.1.to_string());
    ShiftInvarianceReport {
        d: d.to_string(),
        e: e.to_string(),
        shifted: s(&sh),
        reversed: s(&rv),
        scaled: s(&sc),
        scaled_expected: s(&expect),
        pass,
    }
}

/// Determinant by fraction-free Bareiss elimination with row pivoting.
pub fn det_bareiss(m: &[Vec<ExactNumber>]) -> ExactNumber {
    let n = m.len();
    if n == 0 {
        return ExactNumber::one();
    }
    let mut a: Vec<Vec<ExactNumber>> = m.to_vec();
    let mut sign = ExactNumber::one();
    let mut prev = ExactNumber::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return ExactNumber::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = &num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    &sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactNumber {
        ExactNumber::from_ratio(n, d)
    }

    #[test]
    fn eisenstein_of_simple_quartics() {
        let p = Poly::from_ints(&[1, 0, 0, 0, 1]);
        assert_eq!(eisenstein_invariants(&p), (q(1, 1), q(0, 1)));
        let p2 = Poly::from_ints(&[1, 0, 0, 0, 16]);
        assert_eq!(eisenstein_invariants(&p2), (q(16, 1), q(0, 1)));
        assert_eq!(quartic_discriminant(&p), q(256, 1));
    }

    #[test]
    fn patterns() {
        // x² as a quartic form: double root at 0 and at infinity
        assert_eq!(
            multiplicity_pattern(&Poly::from_ints(&[0, 0, 1]).nominal(4)),
            MultiplicityPattern::DoubleDouble
        );
        // (x-1)²(x-2)²
        let a = Poly::from_ints(&[-1, 1]);
        let b = Poly::from_ints(&[-2, 1]);
        let p = a.mul(&a).mul(&b).mul(&b);
        assert_eq!(multiplicity_pattern(&p), MultiplicityPattern::DoubleDouble);
        // 4x(2x-1)(3x-1): cubic, simple root at infinity
        let c = Poly::from_ints(&[0, 4])
            .mul(&Poly::from_ints(&[-1, 2]))
            .mul(&Poly::from_ints(&[-1, 3]))
            .nominal(4);
        assert_eq!(multiplicity_pattern(&c), MultiplicityPattern::Simple);
        assert_eq!(
            multiplicity_pattern(&Poly::zero().nominal(4)),
            MultiplicityPattern::Undefined
        );
        assert_eq!(
            multiplicity_pattern(&Poly::from_ints(&[5]).nominal(4)),
            MultiplicityPattern::Quadruple
        );
        assert_eq!(
            multiplicity_pattern(&a.mul(&a).mul(&a).nominal(4)),
            MultiplicityPattern::TripleSimple
        );
    }

    #[test]
    fn shift_reversal_scale() {
        let p = Poly::from_ints(&[1, 0, 0, 0, 1]);
        let r = shift_invariance_check(&p, &q(3, 1), &q(2, 3));
        assert!(r.pass, "{r:?}");
        assert_eq!(r.scaled, ("16/81".into(), "0".into()));
    }

    #[test]
    fn division_and_gcd() {
        let a = Poly::from_ints(&[-1, 1]);
        let b = Poly::from_ints(&[2, 0, 1]);
        let p = a.mul(&b);
        let (qq, r) = p.divrem(&b);
        assert!(r.is_zero());
        assert_eq!(qq, a);
        assert_eq!(p.gcd(&a.mul(&Poly::from_ints(&[5, 1]))), a);
    }

    #[test]
    fn square_root_detects_squares() {
        let s = Poly::from_ints(&[3, -2, 1]);
        let p = s.mul(&s).scale(&q(7, 2));
        let (lc, r) = p.square_root().unwrap();
        assert_eq!(lc, q(7, 2));
        assert_eq!(r, s);
        assert!(Poly::from_ints(&[1, 0, 1, 0, 1]).square_root().is_none());
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m: Vec<Vec<ExactNumber>> = [[2, -1, 0], [1, 3, 4], [0, 5, -2]]
            .iter()
            .map(|r| r.iter().map(|&v| q(v, 1)).collect())
            .collect();
        // 2(−6−20) + 1(−2−0) = −54
        assert_eq!(det_bareiss(&m), q(-54, 1));
        let z: Vec<Vec<ExactNumber>> = [[0, 1], [1, 0]]
            .iter()
            .map(|r| r.iter().map(|&v| q(v, 1)).collect())
            .collect();
        assert_eq!(det_bareiss(&z), q(-1, 1));
    }

    #[test]
    fn display() {
        assert_eq!(
            Poly::from_ints(&[-1, 0, 3, 1]).to_string(),
            "x^3 + 3*x^2 - 1"
        );
    }
}
