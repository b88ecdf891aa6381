//! Singular biquadratics: the fifteen-case classification, double points, pairs of
//! Möbius graphs, and the zero-drift criterion.

use serde::Serialize;

use crate::biquad::{Biquadratic, Transform, P1};
use crate::cubic::{qrt_order, OrderKind, OrderVerdict};
use crate::error::{QrtError, Result};
use crate::numbers::{
    recognize_cos_squared, CosSquared, ExactNumber, TowerContext, DEFAULT_DIGITS,
};
use crate::poly::{MultiplicityPattern as Mp, Poly};
use crate::walks::{walk_diagnostics, WalkSpec};

fn n(v: i64) -> ExactNumber {
    ExactNumber::from_int(v)
}

/// Case label of a biquadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Smooth,
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
    Ix,
    X,
    Xi,
    Xii,
    Xiii,
    Xiv,
    Xv,
}

impl Case {
    pub fn label(&self) -> &'static str {
        use Case::*;
        match self {
            Smooth => "smooth",
            I => "i",
            Ii => "ii",
            Iii => "iii",
            Iv => "iv",
            V => "v",
            Vi => "vi",
            Vii => "vii",
            Viii => "viii",
            Ix => "ix",
            X => "x",
            Xi => "xi",
            Xii => "xii",
            Xiii => "xiii",
            Xiv => "xiv",
            Xv => "xv",
        }
    }

    /// `(d₁, d₂)` required for the case.
    pub fn expected_patterns(&self) -> Option<(Mp, Mp)> {
        use Case::*;
        use Mp::*;
        Some(match self {
            Smooth => return None,
            I => (DoubleSimple, DoubleSimple),
            Ii => (TripleSimple, TripleSimple),
            Iii | Vi | Viii => (DoubleDouble, DoubleDouble),
            Iv | Vii => (Quadruple, Quadruple),
            V | Ix => (Undefined, Undefined),
            X => (Quadruple, Undefined),
            Xi => (Undefined, Quadruple),
            Xii => (DoubleDouble, DoubleSimple),
            Xiii => (Quadruple, TripleSimple),
            Xiv => (DoubleSimple, DoubleDouble),
            Xv => (TripleSimple, Quadruple),
        })
    }

    /// Cases (i)–(ix) can be brought to a symmetric correspondence.
    pub fn symmetrizable(&self) -> bool {
        use Case::*;
        matches!(self, I | Ii | Iii | Iv | V | Vi | Vii | Viii | Ix)
    }

    fn swapped(self) -> Case {
        use Case::*;
        match self {
            X => Xi,
            Xi => X,
            Xii => Xiv,
            Xiii => Xv,
            Xiv => Xii,
            Xv => Xiii,
            c => c,
        }
    }
}

/// An irreducible component or a line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Component {
    /// The whole curve, bidegree (2,2).
    Irreducible,
    /// Bidegree (1,1).
    Conic {
        multiplicity: usize,
    },
    /// `"1-2"` for bidegree (2,1), `"2-1"` for (1,2).
    TwistedCubic {
        correspondence: String,
    },
    Horizontal {
        at: String,
        multiplicity: usize,
    },
    Vertical {
        at: String,
        multiplicity: usize,
    },
}

/// Classification of a biquadratic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularClass {
    pub case: Case,
    pub d1: Mp,
    pub d2: Mp,
    pub components: Vec<Component>,
    pub symmetrizable: bool,
}

impl SingularClass {
    pub fn components_summary(&self) -> String {
        self.components
            .iter()
            .map(|c| match c {
                Component::Irreducible => "irreducible".to_string(),
                Component::Conic { multiplicity: 1 } => "conic".into(),
                Component::Conic { multiplicity } => format!("{multiplicity}x conic"),
                Component::TwistedCubic { correspondence } => {
                    format!("({correspondence}) twisted cubic")
                }
                Component::Horizontal { at, multiplicity } => {
                    line("horizontal", "y", at, *multiplicity)
                }
                Component::Vertical { at, multiplicity } => {
                    line("vertical", "x", at, *multiplicity)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn has_line(&self) -> bool {
        self.components
            .iter()
            .any(|c| matches!(c, Component::Horizontal { .. } | Component::Vertical { .. }))
    }
}

fn line(kind: &str, var: &str, at: &str, k: usize) -> String {
    let pre = if k > 1 {
        format!("{k}x ")
    } else {
        String::new()
    };
    format!("{pre}{kind} line {var} = {at}")
}

/// Line content in one variable: affine gcd and multiplicity of the line at infinity.
struct Content {
    g: Poly,
    at_infinity: usize,
}

impl Content {
    fn degree(&self) -> usize {
        self.g.degree().unwrap_or(0) + self.at_infinity
    }

    /// Lines as `(location, exact root if rational over the field, multiplicity)`.
    fn lines(&self) -> Vec<(String, Option<P1>, usize)> {
        let mut out = Vec::new();
        if self.at_infinity > 0 {
            out.push(("inf".to_string(), Some(P1::Infinity), self.at_infinity));
        }
        for (f, k) in self.g.square_free() {
            if f.degree() == Some(1) {
                let root = -(&f.coeff(0) / &f.coeff(1));
                out.push((root.to_string(), Some(P1::Finite(root)), k));
            } else {
                out.push((format!("root of {}", f.display_in("t")), None, k));
                out.push((format!("root of {}", f.display_in("t")), None, k));
            }
        }
        out
    }
}

/// Common factor of the three polynomials, each of nominal degree 2.
fn content(polys: [&Poly; 3]) -> Content {
    let nonzero: Vec<&Poly> = polys.into_iter().filter(|p| !p.is_zero()).collect();
    let at_infinity = nonzero
        .iter()
        .map(|p| 2 - p.degree().unwrap())
        .min()
        .unwrap_or(0);
    let g = nonzero
        .iter()
        .skip(1)
        .fold(nonzero[0].monic(), |g, p| g.gcd(p));
    Content {
        g: if g.degree() == Some(0) {
            Poly::constant(ExactNumber::one())
        } else {
            g
        },
        at_infinity,
    }
}

/// A bihomogeneous polynomial with nominal bidegree `(nx, ny)`; `c[i][j]` multiplies `x^i y^j`.
#[derive(Debug, Clone)]
struct BiForm {
    c: Vec<Vec<ExactNumber>>,
    nx: usize,
    ny: usize,
}

impl BiForm {
    fn of(q: &Biquadratic) -> Self {
        BiForm {
            c: q.matrix().iter().map(|r| r.to_vec()).collect(),
            nx: 2,
            ny: 2,
        }
    }

    fn divide_y(&self, h: &Content) -> Self {
        let c: Vec<Vec<ExactNumber>> = self
            .c
            .iter()
            .map(|row| {
                let q = Poly::new(row.clone()).div_exact(&h.g);
                (0..=self.ny - h.degree()).map(|j| q.coeff(j)).collect()
            })
            .collect();
        BiForm {
            c,
            nx: self.nx,
            ny: self.ny - h.degree(),
        }
    }

    fn transposed(&self) -> Self {
        let c = (0..=self.ny)
            .map(|j| (0..=self.nx).map(|i| self.c[i][j].clone()).collect())
            .collect();
        BiForm {
            c,
            nx: self.ny,
            ny: self.nx,
        }
    }

    fn divide_x(&self, v: &Content) -> Self {
        self.transposed().divide_y(v).transposed()
    }

    fn weights(p: &P1, deg: usize) -> Vec<ExactNumber> {
        (0..=deg)
            .map(|k| match p {
                P1::Finite(v) => v.pow(k as u32),
                P1::Infinity => {
                    if k == deg {
                        ExactNumber::one()
                    } else {
                        ExactNumber::zero()
                    }
                }
            })
            .collect()
    }

    fn eval(&self, x: &P1, y: &P1) -> ExactNumber {
        let wx = Self::weights(x, self.nx);
        let wy = Self::weights(y, self.ny);
        let mut acc = ExactNumber::zero();
        for i in 0..=self.nx {
            for j in 0..=self.ny {
                acc = &acc + &(&self.c[i][j] * &(&wx[i] * &wy[j]));
            }
        }
        acc
    }

    /// Coefficients in `x` after fixing `y`.
    fn at_y(&self, y: &P1) -> Vec<ExactNumber> {
        let wy = Self::weights(y, self.ny);
        (0..=self.nx)
            .map(|i| (0..=self.ny).map(|j| &self.c[i][j] * &wy[j]).sum())
            .collect()
    }
}

/// Assigns one of the fifteen singular cases, or `smooth`.
pub fn classify(q: &Biquadratic) -> Result<SingularClass> {
    let (d1, d2) = q.critical_patterns();
    let inv = q.curve_invariants()?;
    if inv.is_smooth() {
        return Ok(SingularClass {
            case: Case::Smooth,
            d1,
            d2,
            components: vec![Component::Irreducible],
            symmetrizable: false,
        });
    }
    let p = q.coefficient_polys();
    let v = content([&p.a, &p.b, &p.c]);
    let h = content([&p.at, &p.bt, &p.ct]);
    let mut components = Vec::new();
    for (at, _, k) in h.lines() {
        components.push(Component::Horizontal {
            at,
            multiplicity: k,
        });
    }
    for (at, _, k) in v.lines() {
        components.push(Component::Vertical {
            at,
            multiplicity: k,
        });
    }
    let case = match (v.degree(), h.degree()) {
        (0, 0) => {
            let (case, comps) = match d1 {
                Mp::DoubleSimple => (Case::I, vec![Component::Irreducible]),
                Mp::TripleSimple => (Case::Ii, vec![Component::Irreducible]),
                Mp::DoubleDouble => (Case::Iii, vec![Component::Conic { multiplicity: 1 }; 2]),
                Mp::Quadruple => (Case::Iv, vec![Component::Conic { multiplicity: 1 }; 2]),
                Mp::Undefined => (Case::V, vec![Component::Conic { multiplicity: 2 }]),
                Mp::Simple => {
                    return Err(QrtError::Internal(
                        "singular curve with simple branch points".into(),
                    ))
                }
            };
            components.extend(comps);
            case
        }
        (1, 1) => {
            let r = BiForm::of(q).divide_y(&h).divide_x(&v);
            let x0 = v.lines()[0].1.clone().expect("linear content has a root");
            let y0 = h.lines()[0].1.clone().expect("linear content has a root");
            components.push(Component::Conic { multiplicity: 1 });
            if r.eval(&x0, &y0).is_zero() {
                Case::Vii
            } else {
                Case::Vi
            }
        }
        (2, 2) => {
            let distinct = |c: &Content| c.lines().iter().all(|l| l.2 == 1);
            match (distinct(&v), distinct(&h)) {
                (true, true) => Case::Viii,
                (false, false) => Case::Ix,
                (false, true) => Case::X,
                (true, false) => Case::Xi,
            }
        }
        (0, 1) => {
            let r = BiForm::of(q).divide_y(&h);
            let y0 = h.lines()[0].1.clone().expect("linear content has a root");
            let c = r.at_y(&y0);
            components.push(Component::TwistedCubic {
                correspondence: "1-2".into(),
            });
            let disc = &(&c[1] * &c[1]) - &(&n(4) * &(&c[2] * &c[0]));
            if disc.is_zero() {
                Case::Xiii
            } else {
                Case::Xii
            }
        }
        (1, 0) => {
            let mut inner = classify(&q.swapped())?;
            inner.case = inner.case.swapped();
            return finish(inner.case, d1, d2, components_swapped(inner.components));
        }
        (dv, dh) => {
            return Err(QrtError::Internal(format!(
                "impossible line content: {dv} vertical, {dh} horizontal"
            )));
        }
    };
    finish(case, d1, d2, components)
}

fn components_swapped(cs: Vec<Component>) -> Vec<Component> {
    cs.into_iter()
        .map(|c| match c {
            Component::Horizontal { at, multiplicity } => Component::Vertical { at, multiplicity },
            Component::Vertical { at, multiplicity } => Component::Horizontal { at, multiplicity },
            Component::TwistedCubic { .. } => Component::TwistedCubic {
                correspondence: "2-1".into(),
            },
            c => c,
        })
        .collect()
}

fn finish(case: Case, d1: Mp, d2: Mp, components: Vec<Component>) -> Result<SingularClass> {
    if case.expected_patterns() != Some((d1, d2)) {
        return Err(QrtError::Internal(format!(
            "inconsistent patterns: case ({}) expects {:?} but d1 = {d1}, d2 = {d2}",
            case.label(),
            case.expected_patterns()
        )));
    }
    Ok(SingularClass {
        case,
        d1,
        d2,
        components,
        symmetrizable: case.symmetrizable(),
    })
}

/// Singular point of a curve in case (i) or (ii), in the original coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Location {
    pub x: String,
    pub y: String,
}

/// Moves the node or cusp of an irreducible singular curve to the origin.
///
/// Returns the curve with `a₀₀ = a₁₀ = a₀₁ = 0` and the original location. A singular
/// point at infinity is first brought to a finite chart by inversion.
pub fn normalize_double_point(q: &Biquadratic) -> Result<(Biquadratic, Location)> {
    let (dy, _) = q.discriminant_quartics();
    if dy.is_zero() {
        return Err(QrtError::Degenerate(
            "the discriminant vanishes identically".into(),
        ));
    }
    let deg = dy.degree().unwrap();
    let multiple = dy.square_free().into_iter().find(|(_, k)| *k >= 2);
    let (mut cur, x_label) = match multiple {
        Some((f, _)) if f.degree() == Some(1) => {
            let x0 = -(&f.coeff(0) / &f.coeff(1));
            (
                q.transform(&Transform::TranslateX(x0.clone())),
                x0.to_string(),
            )
        }
        Some((f, _)) => {
            return Err(QrtError::Degenerate(format!(
                "multiple branch factor {} is not linear",
                f.display_in("x")
            )))
        }
        None if 4 - deg >= 2 => (q.transform(&Transform::InvertX), "inf".into()),
        None => return Err(QrtError::Degenerate("no multiple branch point".into())),
    };
    let (a, b, _) = cur.y_fiber(&P1::Finite(ExactNumber::zero()));
    let y_label = if a.is_zero() {
        cur = cur.transform(&Transform::InvertY);
        "inf".to_string()
    } else {
        let y0 = -(&b / &(&n(2) * &a));
        cur = cur.transform(&Transform::TranslateY(y0.clone()));
        y0.to_string()
    };
    if !(cur.a(0, 0).is_zero() && cur.a(1, 0).is_zero() && cur.a(0, 1).is_zero()) {
        return Err(QrtError::Internal(
            "normalization did not place the singular point at the origin".into(),
        ));
    }
    Ok((
        cur,
        Location {
            x: x_label,
            y: y_label,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Node,
    Cusp,
}

/// Periodicity at an ordinary double point or a cusp.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublePointReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    pub kind: PointKind,
    /// `a₁₁²/(4a₂₀a₀₂)`
    pub ratio: String,
    pub periodicity: CosSquared,
    pub period: Option<u32>,
    pub witness_m: Option<u32>,
}

/// Periodicity of the QRT map on a curve with its singular point at the origin.
pub fn double_point_period(qn: &Biquadratic, n_max: u32) -> Result<DoublePointReport> {
    if !(qn.a(0, 0).is_zero() && qn.a(1, 0).is_zero() && qn.a(0, 1).is_zero()) {
        return Err(QrtError::Invalid(
            "the singular point is not at the origin".into(),
        ));
    }
    let den = &n(4) * &(qn.a(2, 0) * qn.a(0, 2));
    if den.is_zero() {
        return Err(QrtError::Invalid(
            "a20*a02 = 0: the curve is reducible".into(),
        ));
    }
    let ratio = &(qn.a(1, 1) * qn.a(1, 1)) / &den;
    Ok(report_from_ratio(ratio, n_max))
}

fn report_from_ratio(ratio: ExactNumber, n_max: u32) -> DoublePointReport {
    if ratio.is_one() {
        return DoublePointReport {
            location: None,
            kind: PointKind::Cusp,
            ratio: ratio.to_string(),
            periodicity: CosSquared::Aperiodic {
                reason: "cusp".into(),
            },
            period: None,
            witness_m: None,
        };
    }
    let periodicity = recognize_cos_squared(&ratio, n_max, DEFAULT_DIGITS);
    let (period, witness_m) = match periodicity {
        CosSquared::Periodic { n, m, .. } => (Some(n), Some(m)),
        _ => (None, None),
    };
    DoublePointReport {
        location: None,
        kind: PointKind::Node,
        ratio: ratio.to_string(),
        periodicity,
        period,
        witness_m,
    }
}

/// A Möbius map `u ↦ (αu + β)/(γu + δ)` as `[[α, β], [γ, δ]]`.
pub type Mobius = [[ExactNumber; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MobiusType {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobiusReport {
    pub order: Option<u32>,
    pub kind: MobiusType,
    /// `tr(M)²/(4 det M)` for `M = φ₂⁻¹∘φ₁`.
    pub ratio: String,
    /// `M^order` is scalar by direct powering.
    pub confirmed_by_power: bool,
}

fn mat_mul(a: &Mobius, b: &Mobius) -> Mobius {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]))
    })
}

fn mat_det(a: &Mobius) -> ExactNumber {
    &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0])
}

fn is_scalar(a: &Mobius) -> bool {
    a[0][1].is_zero() && a[1][0].is_zero() && a[0][0] == a[1][1]
}

/// Minimal `N ≤ n_max` with `(φ₂⁻¹∘φ₁)^N = Id`.
pub fn mobius_order(phi1: &Mobius, phi2: &Mobius, n_max: u32) -> Result<MobiusReport> {
    if mat_det(phi1).is_zero() || mat_det(phi2).is_zero() {
        return Err(QrtError::Invalid("singular Mobius matrix".into()));
    }
    let adj2: Mobius = [
        [phi2[1][1].clone(), -phi2[0][1].clone()],
        [-phi2[1][0].clone(), phi2[0][0].clone()],
    ];
    let m = mat_mul(&adj2, phi1);
    let tr = &m[0][0] + &m[1][1];
    let ratio = &(&tr * &tr) / &(&n(4) * &mat_det(&m));
    Ok(mobius_report(ratio, is_scalar(&m), n_max, |k| {
        let mut p = m.clone();
        for _ in 1..k {
            p = mat_mul(&p, &m);
        }
        is_scalar(&p)
    }))
}

fn mobius_report(
    ratio: ExactNumber,
    identity: bool,
    n_max: u32,
    power_is_scalar: impl Fn(u32) -> bool,
) -> MobiusReport {
    if identity {
        return MobiusReport {
            order: Some(1),
            kind: MobiusType::Identity,
            ratio: ratio.to_string(),
            confirmed_by_power: true,
        };
    }
    let kind = if ratio.is_one() {
        MobiusType::Parabolic
    } else if !ratio.is_negative() && (&ratio - &ExactNumber::one()).is_negative() {
        MobiusType::Elliptic
    } else {
        MobiusType::Loxodromic
    };
    let order = recognize_cos_squared(&ratio, n_max, DEFAULT_DIGITS)
        .period()
        .filter(|_| kind == MobiusType::Elliptic);
    let confirmed_by_power = order.is_none_or(&power_is_scalar);
    MobiusReport {
        order,
        kind,
        ratio: ratio.to_string(),
        confirmed_by_power,
    }
}

/// `re + ω·im` with `ω² = λ`.
#[derive(Debug, Clone, PartialEq)]
struct Conj {
    re: ExactNumber,
    im: ExactNumber,
}

impl Conj {
    fn real(re: ExactNumber) -> Self {
        Conj {
            re,
            im: ExactNumber::zero(),
        }
    }

    fn add(&self, o: &Conj) -> Conj {
        Conj {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn mul(&self, o: &Conj, lambda: &ExactNumber) -> Conj {
        Conj {
            re: &(&self.re * &o.re) + &(&(&self.im * &o.im) * lambda),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

type ConjMobius = [[Conj; 2]; 2];

fn conj_mat_mul(a: &ConjMobius, b: &ConjMobius, lambda: &ExactNumber) -> ConjMobius {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            a[i][0]
                .mul(&b[0][j], lambda)
                .add(&a[i][1].mul(&b[1][j], lambda))
        })
    })
}

fn conj_is_scalar(a: &ConjMobius) -> bool {
    a[0][1].is_zero() && a[1][0].is_zero() && a[0][0] == a[1][1]
}

/// Order of `φ₋⁻¹∘φ₊` for conjugate graphs `φ± = P ± ωR`, `ω² = λ < 0`.
///
/// Conjugation sends `M` to `M⁻¹`, so `tr(M)²/det M` is fixed and lies in the real tower:
/// `tr M = 2(det P − λ det R)` and `det M = (det P + λ det R)² − λ·mix²`, where `mix` is the
/// mixed determinant of `P` and `R`.
pub fn mobius_order_conjugate(
    p: &Mobius,
    r: &Mobius,
    lambda: &ExactNumber,
    n_max: u32,
) -> Result<MobiusReport> {
    let (dp, dr) = (mat_det(p), mat_det(r));
    let mix = &(&(&(&p[0][0] * &r[1][1]) + &(&p[1][1] * &r[0][0])) - &(&p[0][1] * &r[1][0]))
        - &(&p[1][0] * &r[0][1]);
    let det_m = &(&dp + &(lambda * &dr)).pow(2) - &(lambda * &mix.pow(2));
    if det_m.is_zero() {
        return Err(QrtError::Invalid("singular Mobius matrix".into()));
    }
    let tr = &n(2) * &(&dp - &(lambda * &dr));
    let ratio = &(&tr * &tr) / &(&n(4) * &det_m);
    let phi = |sign: i64| -> ConjMobius {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| Conj {
                re: p[i][j].clone(),
                im: &n(sign) * &r[i][j],
            })
        })
    };
    let minus = phi(-1);
    let adj: ConjMobius = [
        [
            minus[1][1].clone(),
            Conj {
                re: -minus[0][1].re.clone(),
                im: -minus[0][1].im.clone(),
            },
        ],
        [
            Conj {
                re: -minus[1][0].re.clone(),
                im: -minus[1][0].im.clone(),
            },
            minus[0][0].clone(),
        ],
    ];
    let m = conj_mat_mul(&adj, &phi(1), lambda);
    Ok(mobius_report(ratio, conj_is_scalar(&m), n_max, |k| {
        let mut acc = m.clone();
        for _ in 1..k {
            acc = conj_mat_mul(&acc, &m, lambda);
        }
        conj_is_scalar(&acc)
    }))
}

/// `Σ c_i x^i` with coefficients in `Q(ω)`, lowest degree first.
fn conj_poly_eval(c: &[Conj], x: &Conj, lambda: &ExactNumber) -> Conj {
    c.iter()
        .rev()
        .fold(Conj::real(ExactNumber::zero()), |acc, ci| {
            acc.mul(x, lambda).add(ci)
        })
}

/// Quotient of `c` by `x − root`, which must divide it.
fn conj_poly_deflate(c: &[Conj], root: &Conj, lambda: &ExactNumber) -> Vec<Conj> {
    let mut out = vec![Conj::real(ExactNumber::zero()); c.len() - 1];
    let mut carry = Conj::real(ExactNumber::zero());
    for i in (1..c.len()).rev() {
        carry = c[i].add(&carry.mul(root, lambda));
        out[i - 1] = carry.clone();
    }
    out
}

/// Graphs `φ± = P ± ωR` of a conic pair that is conjugate over `Q(ω)`, `ω² = λ < 0`;
/// returns `(P, R, λ)`.
pub fn conic_pair_conjugate(
    q: &Biquadratic,
    ctx: &TowerContext,
) -> Result<(Mobius, Mobius, ExactNumber)> {
    let (dy, _) = q.discriminant_quartics();
    let (lambda, s) = dy
        .square_root()
        .ok_or_else(|| QrtError::Degenerate("the discriminant is not a perfect square".into()))?;
    if !lambda.is_negative() {
        return Err(QrtError::Invalid("the conic pair is real".into()));
    }
    let p = q.coefficient_polys();
    // y = (−b ± ω s)/(2a); first cancel any real common factor.
    let (mut b, mut s, mut a) = (p.b.clone(), s, p.a.scale(&n(2)));
    let g = b.gcd(&s).gcd(&a);
    if g.degree().unwrap_or(0) > 0 {
        b = b.div_exact(&g);
        s = s.div_exact(&g);
        a = a.div_exact(&g);
    }
    let lift = |re: &Poly, im: &Poly| -> Vec<Conj> {
        (0..3)
            .map(|i| Conj {
                re: re.coeff(i),
                im: im.coeff(i),
            })
            .collect()
    };
    let mut num = lift(&b.scale(&n(-1)), &s);
    let mut den = lift(&a, &Poly::zero());
    if a.degree().unwrap_or(0) == 2 {
        // The cancelled factor is x − x₀ with x₀ a non-real root of a.
        let (a2, a1, a0) = (a.coeff(2), a.coeff(1), a.coeff(0));
        let delta = &(&a1 * &a1) - &(&n(4) * &(&a2 * &a0));
        let t = ctx.sqrt(&(&delta / &lambda))?;
        let root = [&t, &-t.clone()]
            .into_iter()
            .map(|t| Conj {
                re: -(&a1 / &(&n(2) * &a2)),
                im: t / &(&n(2) * &a2),
            })
            .find(|x0| conj_poly_eval(&num, x0, &lambda).is_zero())
            .ok_or_else(|| {
                QrtError::Internal("conjugate conic branch is not a Mobius map".into())
            })?;
        num = conj_poly_deflate(&num, &root, &lambda);
        den = conj_poly_deflate(&den, &root, &lambda);
    }
    if num
        .iter()
        .skip(2)
        .chain(den.iter().skip(2))
        .any(|c| !c.is_zero())
    {
        return Err(QrtError::Internal(
            "conjugate conic branch is not a Mobius map".into(),
        ));
    }
    let part = |f: fn(&Conj) -> ExactNumber| -> Mobius {
        [[f(&num[1]), f(&num[0])], [f(&den[1]), f(&den[0])]]
    };
    Ok((part(|c| c.re.clone()), part(|c| c.im.clone()), lambda))
}

/// The two Möbius graphs `y = φ₁(x)`, `y = φ₂(x)` of a curve in case (iii) or (iv).
pub fn conic_pair(q: &Biquadratic, ctx: &TowerContext) -> Result<(Mobius, Mobius)> {
    let (dy, _) = q.discriminant_quartics();
    let (lc, s) = dy
        .square_root()
        .ok_or_else(|| QrtError::Degenerate("the discriminant is not a perfect square".into()))?;
    let k = ctx.sqrt(&lc)?;
    let p = q.coefficient_polys();
    let den = p.a.scale(&n(2));
    let ks = s.scale(&k);
    let branch = |num: Poly| -> Result<Mobius> {
        let g = num.gcd(&den);
        let (top, bottom) = (num.div_exact(&g), den.div_exact(&g));
        if top.degree().unwrap_or(0) > 1 || bottom.degree().unwrap_or(0) > 1 {
            return Err(QrtError::Internal(
                "conic branch is not a Mobius map".into(),
            ));
        }
        Ok([
            [top.coeff(1), top.coeff(0)],
            [bottom.coeff(1), bottom.coeff(0)],
        ])
    };
    let minus_b = p.b.scale(&n(-1));
    Ok((branch(minus_b.add(&ks))?, branch(minus_b.sub(&ks))?))
}

/// How an order verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderRoute {
    Smooth,
    DoublePoint,
    Cusp,
    Mobius,
    DoubleConic,
    LineComponent,
}

/// Order verdict for any biquadratic, with its classification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderAnalysis {
    pub class: SingularClass,
    pub route: OrderRoute,
    pub verdict: OrderVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub double_point: Option<DoublePointReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mobius: Option<MobiusReport>,
}

/// Classifies `q` and decides the QRT order along the matching route.
pub fn analyze_order(q: &Biquadratic, n_max: u32, oracle: bool) -> Result<OrderAnalysis> {
    let class = classify(q)?;
    let out = |route, verdict, dp, mb| OrderAnalysis {
        class: class.clone(),
        route,
        verdict,
        double_point: dp,
        mobius: mb,
    };
    match class.case {
        Case::Smooth => Ok(out(
            OrderRoute::Smooth,
            qrt_order(q, n_max, oracle)?,
            None,
            None,
        )),
        Case::I | Case::Ii => {
            let (qn, loc) = normalize_double_point(q)?;
            let mut rep = double_point_period(&qn, n_max)?;
            rep.location = Some(loc);
            let cert = format!(
                "a11^2/(4 a20 a02) = {} after moving the singular point to the origin",
                rep.ratio
            );
            let kind = match (&rep.kind, &rep.periodicity) {
                (PointKind::Cusp, _) => OrderKind::Aperiodic,
                (_, CosSquared::Periodic { n, .. }) => OrderKind::Finite { n: *n },
                (_, CosSquared::NoPeriodUpTo { n_max }) => OrderKind::NoOrderUpTo { n_max: *n_max },
                _ => OrderKind::Aperiodic,
            };
            let route = if rep.kind == PointKind::Cusp {
                OrderRoute::Cusp
            } else {
                OrderRoute::DoublePoint
            };
            Ok(out(
                route,
                OrderVerdict::with_kind(kind, cert),
                Some(rep),
                None,
            ))
        }
        Case::Iii | Case::Iv => {
            let ctx = TowerContext::new();
            let rep = match conic_pair_conjugate(q, &ctx) {
                Ok((p, r, lambda)) => mobius_order_conjugate(&p, &r, &lambda, n_max)?,
                Err(QrtError::Invalid(_)) => {
                    let (p1, p2) = conic_pair(q, &ctx)?;
                    mobius_order(&p1, &p2, n_max)?
                }
                Err(e) => return Err(e),
            };
            let kind = match (rep.order, rep.kind) {
                (Some(1), _) => OrderKind::Identity,
                (Some(k), _) => OrderKind::Finite { n: k },
                (None, MobiusType::Elliptic) => OrderKind::NoOrderUpTo { n_max },
                (None, _) => OrderKind::Aperiodic,
            };
            let cert = format!("tr(M)^2/(4 det M) = {} for M = phi2^-1 phi1", rep.ratio);
            Ok(out(
                OrderRoute::Mobius,
                OrderVerdict::with_kind(kind, cert),
                None,
                Some(rep),
            ))
        }
        Case::V => Ok(out(
            OrderRoute::DoubleConic,
            OrderVerdict::with_kind(
                OrderKind::Identity,
                "double conic: both switches coincide".into(),
            ),
            None,
            None,
        )),
        _ => Ok(out(
            OrderRoute::LineComponent,
            OrderVerdict::with_kind(
                OrderKind::UndefinedLineComponent,
                format!(
                    "case ({}) contains a line: {}",
                    class.case.label(),
                    class.components_summary()
                ),
            ),
            None,
            None,
        )),
    }
}

/// Zero-drift periodicity with optional correlation data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroDriftReport {
    /// `(a₀₀−a₀₂−a₂₀+a₂₂)² / (4(a₂₀+a₂₁+a₂₂)(a₀₂+a₁₂+a₂₂))`
    pub ratio: String,
    pub report: DoublePointReport,
    pub group_order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// `2·min{ℓ : ℓθ/π ∈ ℤ}` from the correlation coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_group_order: Option<u32>,
}

/// Periodicity of a curve whose coefficients satisfy the three zero-drift relations.
pub fn zero_drift_period(q: &Biquadratic, n_max: u32) -> Result<ZeroDriftReport> {
    let a = |i, j| q.a(i, j).clone();
    let total: ExactNumber = q.matrix().iter().flatten().cloned().sum();
    let row0 = &(&a(0, 0) + &a(0, 1)) + &a(0, 2);
    let row2 = &(&a(2, 0) + &a(2, 1)) + &a(2, 2);
    let col0 = &(&a(0, 0) + &a(1, 0)) + &a(2, 0);
    let col2 = &(&a(0, 2) + &a(1, 2)) + &a(2, 2);
    if !total.is_zero() || row0 != row2 || col0 != col2 {
        return Err(QrtError::Invalid(
            "the zero-drift relations do not hold".into(),
        ));
    }
    let num = &(&(&a(0, 0) - &a(0, 2)) - &a(2, 0)) + &a(2, 2);
    let den = &n(4) * &(&row2 * &col2);
    if den.is_zero() {
        return Err(QrtError::Invalid(
            "zero-drift denominator vanishes: the curve is reducible".into(),
        ));
    }
    let ratio = &(&num * &num) / &den;
    let report = report_from_ratio(ratio.clone(), n_max);
    Ok(ZeroDriftReport {
        ratio: ratio.to_string(),
        group_order: report.period.map(|p| 2 * p),
        report,
        theta: None,
        correlation_group_order: None,
    })
}

/// Zero-drift periodicity of a walk, with the correlation angle alongside.
pub fn zero_drift_walk(w: &WalkSpec, n_max: u32) -> Result<ZeroDriftReport> {
    let mut rep = zero_drift_period(&crate::walks::kernel(w)?, n_max)?;
    let d = walk_diagnostics(w, n_max, DEFAULT_DIGITS)?;
    rep.theta = Some(d.theta);
    rep.correlation_group_order = d.group_order;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biquad::{orbit_closes, CurvePoint};

    fn r(a: i64, b: i64) -> ExactNumber {
        ExactNumber::from_ratio(a, b)
    }

    #[test]
    fn double_point_example_has_period_three() {
        let q = Biquadratic::from_ints([[0, 0, 1], [0, -1, 3], [1, 2, 1]]).unwrap();
        let a = analyze_order(&q, 24, false).unwrap();
        assert_eq!(a.class.case, Case::I);
        assert_eq!(a.verdict.qrt_order(), Some(3));
        assert_eq!(a.double_point.unwrap().ratio, "1/4");
    }

    #[test]
    fn cusp_example_normalizes_as_printed() {
        // 2x²y − 3x² + xy² − 3x − 1
        let q = Biquadratic::from_ints([[-1, 0, 0], [-3, 0, 1], [-3, 2, 0]]).unwrap();
        assert_eq!(classify(&q).unwrap().case, Case::Ii);
        let (qn, loc) = normalize_double_point(&q).unwrap();
        assert_eq!((loc.x.as_str(), loc.y.as_str()), ("-1", "1"));
        assert_eq!(
            qn,
            Biquadratic::from_ints([[0, 0, -1], [0, -2, 1], [-1, 2, 0]]).unwrap()
        );
        let rep = double_point_period(&qn, 24).unwrap();
        assert_eq!(rep.kind, PointKind::Cusp);
        assert_eq!(
            analyze_order(&q, 24, false).unwrap().verdict.kind,
            OrderKind::Aperiodic
        );
    }

    #[test]
    fn node_family_location() {
        for alpha in [r(1, 3), r(3, 4), n(2)] {
            // 2x²y + xy² − (2α+1)x² − α(α+2)x − α²
            let mut a: [[ExactNumber; 3]; 3] = Default::default();
            a[2][1] = n(2);
            a[1][2] = n(1);
            a[2][0] = -(&(&n(2) * &alpha) + &n(1));
            a[1][0] = -(&alpha * &(&alpha + &n(2)));
            a[0][0] = -(&alpha * &alpha);
            let q = Biquadratic::new(a).unwrap();
            assert_eq!(classify(&q).unwrap().case, Case::I);
            let (_, loc) = normalize_double_point(&q).unwrap();
            assert_eq!(loc.x, (-alpha.clone()).to_string());
            assert_eq!(loc.y, alpha.to_string());
        }
    }

    #[test]
    fn line_component_cases() {
        // (x² + y)(y + 1)
        let q = Biquadratic::from_ints([[0, 1, 1], [0, 0, 0], [1, 1, 0]]).unwrap();
        let c = classify(&q).unwrap();
        assert!(matches!(c.case, Case::Xii | Case::Xiii), "{:?}", c);
        assert!(c
            .components
            .iter()
            .any(|x| matches!(x, Component::Horizontal { at, .. } if at == "-1")));
        // 2xy(xy + 1)
        let rhombus = Biquadratic::from_ints([[0, 0, 0], [0, 2, 0], [0, 0, 2]]).unwrap();
        assert_eq!(classify(&rhombus).unwrap().case, Case::Vi);
        // xy(x + y + xy) passes through H ∩ V
        let vii = Biquadratic::from_ints([[0, 0, 0], [0, 0, 1], [0, 1, 1]]).unwrap();
        assert_eq!(classify(&vii).unwrap().case, Case::Vii);
        // (x − 1)(x + 1)(y − 2)y
        let viii = Biquadratic::from_ints([[0, 2, -1], [0, 0, 0], [0, -2, 1]]).unwrap();
        assert_eq!(classify(&viii).unwrap().case, Case::Viii);
        // x²y²
        assert_eq!(
            classify(&Biquadratic::from_ints([[0, 0, 0], [0, 0, 0], [0, 0, 1]]).unwrap())
                .unwrap()
                .case,
            Case::Ix
        );
        // x²(y² − 1) and its swap
        let x = Biquadratic::from_ints([[0, 0, 0], [0, 0, 0], [-1, 0, 1]]).unwrap();
        assert_eq!(classify(&x).unwrap().case, Case::X);
        assert_eq!(classify(&x.swapped()).unwrap().case, Case::Xi);
        assert_eq!(
            classify(&q.swapped()).unwrap().case,
            classify(&q).unwrap().case.swapped()
        );
    }

    #[test]
    fn conic_pairs_and_double_conic() {
        // (xy − x − 2y)(xy − 3x + y) with two common points
        let c1 = [[0, -2, 0], [-1, 1, 0], [0, 0, 0]];
        let c2 = [[0, 1, 0], [-3, 1, 0], [0, 0, 0]];
        let q = Biquadratic::new(product(c1, c2)).unwrap();
        let a = analyze_order(&q, 24, false).unwrap();
        assert!(matches!(a.class.case, Case::Iii | Case::Iv));
        assert_eq!(a.route, OrderRoute::Mobius);
        let dc = Biquadratic::new(product(c1, c1)).unwrap();
        assert_eq!(classify(&dc).unwrap().case, Case::V);
    }

    #[test]
    fn conjugate_conic_pair() {
        // (xy + x + y)² + x² = (xy + (1+i)x + y)(xy + (1−i)x + y)
        let q = Biquadratic::from_ints([[0, 0, 1], [0, 2, 2], [2, 2, 1]]).unwrap();
        let a = analyze_order(&q, 24, false).unwrap();
        assert!(matches!(a.class.case, Case::Iii | Case::Iv));
        assert_eq!(a.route, OrderRoute::Mobius);
        let rep = a.mobius.unwrap();
        assert_eq!(rep.ratio, "1/2");
        assert_eq!(rep.order, Some(4));
        assert!(rep.confirmed_by_power);
        // The real route rejects it, the conjugate route rejects real pairs.
        let ctx = TowerContext::new();
        assert!(conic_pair(&q, &ctx).is_err());
        let real = Biquadratic::new(product(
            [[0, -2, 0], [-1, 1, 0], [0, 0, 0]],
            [[0, 1, 0], [-3, 1, 0], [0, 0, 0]],
        ))
        .unwrap();
        assert!(matches!(
            conic_pair_conjugate(&real, &ctx),
            Err(QrtError::Invalid(_))
        ));
    }

    fn product(c1: [[i64; 3]; 3], c2: [[i64; 3]; 3]) -> [[ExactNumber; 3]; 3] {
        let mut a: [[ExactNumber; 3]; 3] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        a[i + k][j + l] = &a[i + k][j + l] + &n(c1[i][j] * c2[k][l]);
                    }
                }
            }
        }
        a
    }

    #[test]
    fn mobius_orders() {
        let id: Mobius = [[n(1), n(0)], [n(0), n(1)]];
        assert_eq!(mobius_order(&id, &id, 24).unwrap().order, Some(1));
        let inv: Mobius = [[n(0), n(1)], [n(1), n(0)]];
        assert_eq!(mobius_order(&inv, &id, 24).unwrap().order, Some(2));
        let ctx = TowerContext::new();
        let c = &(&ctx.sqrt(&n(5)).unwrap() - &n(1)) / &n(4);
        let s = ctx.sqrt(&(&n(1) - &(&c * &c))).unwrap();
        let rot: Mobius = [[c.clone(), -s.clone()], [s, c]];
        let rep = mobius_order(&rot, &id, 24).unwrap();
        assert_eq!(rep.order, Some(5));
        assert!(rep.confirmed_by_power);
        let para: Mobius = [[n(1), n(1)], [n(0), n(1)]];
        assert_eq!(
            mobius_order(&para, &id, 24).unwrap().kind,
            MobiusType::Parabolic
        );
    }

    #[test]
    fn zero_drift_simple_walk() {
        let rep = zero_drift_walk(&WalkSpec::simple(), 24).unwrap();
        assert_eq!(rep.ratio, "0");
        assert_eq!(rep.report.period, Some(2));
        assert_eq!(rep.group_order, Some(4));
        assert_eq!(rep.correlation_group_order, Some(4));
        let bad = WalkSpec::from_weights(&[(1, 0, r(1, 2)), (0, 1, r(1, 2))], true).unwrap();
        assert!(zero_drift_walk(&bad, 24).is_err());
    }

    #[test]
    fn k22_quarter_is_a_node_of_period_four() {
        let q = crate::walks::step_set("S22")
            .unwrap()
            .k_t(&r(1, 4))
            .unwrap();
        let a = analyze_order(&q, 24, false).unwrap();
        assert_eq!(a.class.case, Case::I);
        let loc = a.double_point.as_ref().unwrap().location.clone().unwrap();
        assert_eq!((loc.x.as_str(), loc.y.as_str()), ("1", "1"));
        assert_eq!(a.verdict.group_order, Some(8));
        let qf = q.to_f64();
        let start = CurvePoint::new(-2.0, {
            let (a, b, c) = qf.y_fiber(&P1::Finite(-2.0));
            (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
        });
        assert_eq!(orbit_closes(&qf, &start, 12, 1e-9).unwrap(), Some(4));
    }
}
