//! Planar 4-bar links: the correspondence `L`, configurations and the Darboux step,
//! closed-form periodicity, semi-periodicity, Pitot links, and the walk conversion.
//!
//! Chart: `V₃ = (a + b cos φ, b sin φ)`, `V₄ = (d cos ψ, d sin ψ)`, `x = cot(φ/2)`,
//! `y = −tan(ψ/2)`. In this chart the reflection `h` keeps `x` and `v` keeps `y`, so the
//! geometric step `v∘h` is the algebraic `qrt_step_inverse`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::biquad::{qrt_step_inverse, Biquadratic, CurvePoint, P1};
use crate::cubic::{qrt_order, CubicModel, OrderKind, OrderVerdict};
use crate::error::{QrtError, Result};
use crate::numbers::{common_field, parse_number, ExactNumber, TowerContext};
use crate::singular::{analyze_order, Case, OrderAnalysis, PointKind};
use crate::walks::WalkSpec;

fn n(v: i64) -> ExactNumber {
    ExactNumber::from_int(v)
}

/// Closure tolerance for numeric orbits, relative to the longest side.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Reflection axes shorter than this are degenerate.
pub const AXIS_EPS: f64 = 1e-12;
/// Random starts used by the poristic check.
pub const PORISTIC_STARTS: usize = 20;
const SEED: u64 = 0x4ba7_1d0c;

/// Side lengths `(a, b, c, d)` of `V₁V₂`, `V₂V₃`, `V₃V₄`, `V₄V₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourBarLink {
    pub a: ExactNumber,
    pub b: ExactNumber,
    pub c: ExactNumber,
    pub d: ExactNumber,
}

/// Link file: `{"sides": ["3/2", "1", "sqrt(13)/2", "1"]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkFile {
    pub sides: Vec<String>,
}

impl FourBarLink {
    /// Checks positivity, a common tower, and `max < (a+b+c+d)/2`.
    pub fn new(a: ExactNumber, b: ExactNumber, c: ExactNumber, d: ExactNumber) -> Result<Self> {
        let sides = [&a, &b, &c, &d];
        common_field(sides)?;
        if let Some(s) = sides.iter().find(|s| !s.is_positive()) {
            return Err(QrtError::Invalid(format!("side {s} is not positive")));
        }
        let sum = &(&(&a + &b) + &c) + &d;
        for s in sides {
            if !(&sum - &(&n(2) * s)).is_positive() {
                return Err(QrtError::Invalid(format!(
                    "side {s} is not shorter than the half-perimeter {}",
                    &sum / &n(2)
                )));
            }
        }
        Ok(FourBarLink { a, b, c, d })
    }

    pub fn parse(sides: &[&str], ctx: &TowerContext) -> Result<Self> {
        if sides.len() != 4 {
            return Err(QrtError::Invalid(format!(
                "a 4-bar link needs 4 sides, got {}",
                sides.len()
            )));
        }
        let v: Vec<ExactNumber> = sides
            .iter()
            .map(|s| parse_number(s.trim(), ctx))
            .collect::<Result<_, _>>()?;
        let [a, b, c, d]: [ExactNumber; 4] = v.try_into().expect("length checked");
        Self::new(a, b, c, d)
    }

    pub fn from_json(text: &str, ctx: &TowerContext) -> Result<Self> {
        let f: LinkFile =
            serde_json::from_str(text).map_err(|e| QrtError::Invalid(format!("link file: {e}")))?;
        let s: Vec<&str> = f.sides.iter().map(String::as_str).collect();
        Self::parse(&s, ctx)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LinkFile {
            sides: self.sides_text().to_vec(),
        })
        .expect("serializable")
    }

    pub fn sides(&self) -> [&ExactNumber; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn sides_text(&self) -> [String; 4] {
        self.sides().map(|s| s.to_string())
    }

    pub fn sides_f64(&self) -> [f64; 4] {
        self.sides().map(ExactNumber::to_f64)
    }

    /// `(b, c, d, a)`.
    pub fn cyclic_shift(&self) -> Self {
        FourBarLink {
            a: self.b.clone(),
            b: self.c.clone(),
            c: self.d.clone(),
            d: self.a.clone(),
        }
    }

    /// `(a², b², c², d²)`; every periodicity condition is a polynomial in these.
    pub fn squares(&self) -> Squares {
        Squares {
            a: self.a.pow(2),
            b: self.b.pow(2),
            c: self.c.pow(2),
            d: self.d.pow(2),
        }
    }

    /// `2²⁴(abcd)⁴` times the eight sign combinations `a ± b ± c ± d`. With
    /// `F = 256(D³ − 27E²)` the curve discriminant of `L` is `2⁸` times this product.
    pub fn f_l(&self) -> ExactNumber {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let mut out = &n(1 << 24) * &(&(&(a * b) * c) * d).pow(4);
        for sb in [1, -1] {
            for sc in [1, -1] {
                for sd in [1, -1] {
                    let t = &(&(a + &(&n(sb) * b)) + &(&n(sc) * c)) + &(&n(sd) * d);
                    out = &out * &t;
                }
            }
        }
        out
    }
}

/// Squared sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Squares {
    pub a: ExactNumber,
    pub b: ExactNumber,
    pub c: ExactNumber,
    pub d: ExactNumber,
}

impl Squares {
    fn ac(&self) -> ExactNumber {
        &self.a * &self.c
    }
    fn bd(&self) -> ExactNumber {
        &self.b * &self.d
    }
    /// `a² − b² + c² − d²`
    fn s(&self) -> ExactNumber {
        &(&(&self.a - &self.b) + &self.c) - &self.d
    }
}

/// `L(x, y)`: `A₂₂ = (a+b+d)²−c²`, `A₂₀ = (a+b−d)²−c²`, `A₀₂ = (a−b+d)²−c²`,
/// `A₀₀ = (a−b−d)²−c²`, `A₁₁ = 8bd`.
pub fn link_correspondence(l: &FourBarLink) -> Biquadratic {
    let c2 = l.c.pow(2);
    let corner = |sb: i64, sd: i64| &(&(&l.a + &(&n(sb) * &l.b)) + &(&n(sd) * &l.d)).pow(2) - &c2;
    let z = ExactNumber::zero;
    Biquadratic::new([
        [corner(-1, -1), z(), corner(-1, 1)],
        [z(), &(&n(8) * &l.b) * &l.d, z()],
        [corner(1, -1), z(), corner(1, 1)],
    ])
    .expect("A₁₁ = 8bd is nonzero")
}

/// A planar realization with `V₁ = (0, 0)` and `V₂ = (a, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Configuration {
    pub sides: [f64; 4],
    pub v3: [f64; 2],
    pub v4: [f64; 2],
}

fn sub(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    [p[0] - q[0], p[1] - q[1]]
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    let w = sub(p, q);
    w[0].hypot(w[1])
}

/// Reflection of `p` in the line through `o` and `o + u`.
fn reflect(p: [f64; 2], o: [f64; 2], u: [f64; 2]) -> Result<[f64; 2]> {
    let uu = u[0] * u[0] + u[1] * u[1];
    if uu.sqrt() < AXIS_EPS {
        return Err(QrtError::Degenerate(
            "reflection axis has zero length".into(),
        ));
    }
    let w = sub(p, o);
    let t = (w[0] * u[0] + w[1] * u[1]) / uu;
    Ok([o[0] + 2.0 * t * u[0] - w[0], o[1] + 2.0 * t * u[1] - w[1]])
}

/// `cot(θ/2)` from `(cos θ, sin θ)`, using the better conditioned of its two forms.
fn cot_half(c: f64, s: f64) -> P1<f64> {
    if s.abs() >= (1.0 - c).abs() {
        if s == 0.0 {
            return P1::Infinity;
        }
        P1::Finite((1.0 + c) / s)
    } else {
        P1::Finite(s / (1.0 - c))
    }
}

impl Configuration {
    /// Configuration with crank angle `phi`; `upper` picks the side of `V₁V₃` for `V₄`.
    /// `None` when the two circles around `V₁` and `V₃` do not meet.
    pub fn from_angle(sides: [f64; 4], phi: f64, upper: bool) -> Option<Self> {
        let [a, b, c, d] = sides;
        let v3 = [a + b * phi.cos(), b * phi.sin()];
        let r = v3[0].hypot(v3[1]);
        if r < AXIS_EPS {
            return None;
        }
        let along = (d * d - c * c + r * r) / (2.0 * r);
        let h2 = d * d - along * along;
        if h2 < 0.0 {
            return None;
        }
        let h = if upper { h2.sqrt() } else { -h2.sqrt() };
        let u = [v3[0] / r, v3[1] / r];
        let v4 = [along * u[0] - h * u[1], along * u[1] + h * u[0]];
        Some(Configuration { sides, v3, v4 })
    }

    /// Random valid configuration; complex fibers are rejected and resampled.
    pub fn random<R: Rng>(sides: [f64; 4], rng: &mut R) -> Result<Self> {
        for _ in 0..10_000 {
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            if let Some(c) = Self::from_angle(sides, phi, rng.gen_bool(0.5)) {
                if c.darboux_step().is_ok() {
                    return Ok(c);
                }
            }
        }
        Err(QrtError::Degenerate("no real configuration found".into()))
    }

    pub fn v1(&self) -> [f64; 2] {
        [0.0, 0.0]
    }

    pub fn v2(&self) -> [f64; 2] {
        [self.sides[0], 0.0]
    }

    /// Angle of `V₂V₃` against the x-axis.
    pub fn phi(&self) -> f64 {
        let w = sub(self.v3, self.v2());
        w[1].atan2(w[0])
    }

    /// Angle of `V₁V₄` against the x-axis.
    pub fn psi(&self) -> f64 {
        self.v4[1].atan2(self.v4[0])
    }

    /// `(cot(φ/2), −tan(ψ/2))`
    pub fn chart(&self) -> CurvePoint<f64> {
        let [_, b, _, d] = self.sides;
        let w = sub(self.v3, self.v2());
        let x = cot_half(w[0] / b, w[1] / b);
        // −tan(ψ/2) = −1/cot(ψ/2)
        let y = match cot_half(self.v4[0] / d, self.v4[1] / d) {
            P1::Infinity => P1::Finite(0.0),
            P1::Finite(t) if t == 0.0 => P1::Infinity,
            P1::Finite(t) => P1::Finite(-1.0 / t),
        };
        CurvePoint { x, y }
    }

    /// Largest deviation of `|V₂V₃|, |V₃V₄|, |V₄V₁|` from `b, c, d`.
    pub fn side_error(&self) -> f64 {
        let [_, b, c, d] = self.sides;
        [
            dist(self.v3, self.v2()) - b,
            dist(self.v4, self.v3) - c,
            dist(self.v4, self.v1()) - d,
        ]
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()))
    }

    /// `h`: reflect `V₄` in the diagonal `V₁V₃`.
    pub fn h(&self) -> Result<Self> {
        Ok(Configuration {
            v4: reflect(self.v4, self.v1(), self.v3)?,
            ..*self
        })
    }

    /// `v`: reflect `V₃` in the diagonal `V₂V₄`.
    pub fn v(&self) -> Result<Self> {
        Ok(Configuration {
            v3: reflect(self.v3, self.v2(), sub(self.v4, self.v2()))?,
            ..*self
        })
    }

    /// One Darboux step `v∘h`.
    pub fn darboux_step(&self) -> Result<Self> {
        self.h()?.v()
    }

    /// Mirror image in the fixed side `V₁V₂`.
    pub fn mirrored(&self) -> Self {
        Configuration {
            v3: [self.v3[0], -self.v3[1]],
            v4: [self.v4[0], -self.v4[1]],
            ..*self
        }
    }

    /// Largest vertex displacement.
    pub fn distance(&self, o: &Self) -> f64 {
        dist(self.v3, o.v3).max(dist(self.v4, o.v4))
    }

    fn scale(&self) -> f64 {
        self.sides.iter().fold(1.0f64, |m, s| m.max(*s))
    }
}

/// One geometric Darboux step.
pub fn darboux_step_geometric(cfg: &Configuration) -> Result<Configuration> {
    cfg.darboux_step()
}

/// `cfg` followed by `steps` Darboux images.
pub fn darboux_orbit(cfg: &Configuration, steps: usize) -> Result<Vec<Configuration>> {
    let mut out = vec![*cfg];
    for _ in 0..steps {
        let next = out.last().expect("nonempty").darboux_step()?;
        out.push(next);
    }
    Ok(out)
}

/// First `k ≤ max_steps` with `δᵏ(cfg)` back at `target` within tolerance.
pub fn first_return(
    cfg: &Configuration,
    target: &Configuration,
    max_steps: usize,
) -> Result<Option<usize>> {
    let tol = CLOSURE_TOL * cfg.scale();
    let mut cur = *cfg;
    for k in 1..=max_steps {
        cur = cur.darboux_step()?;
        if cur.distance(target) < tol {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Largest chordal gap between the geometric step and the algebraic `qrt_step_inverse`.
pub fn chart_consistency(l: &FourBarLink, cfg: &Configuration) -> Result<f64> {
    let lf = link_correspondence(l).to_f64();
    let geo = cfg.darboux_step()?.chart();
    let alg = qrt_step_inverse(&lf, &cfg.chart())?;
    Ok(geo.distance(&alg))
}

/// Numeric confirmation that the period does not depend on the start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoristicCheck {
    pub starts: usize,
    /// Starts whose first return happened exactly at the expected step.
    pub agreeing: usize,
    pub max_error: f64,
    pub passed: bool,
}

/// For `expected = Some(n)`: every start first returns at step `n`.
/// For `None`: no start returns within `horizon` steps.
pub fn poristic_check(
    sides: [f64; 4],
    expected: Option<u32>,
    horizon: usize,
    starts: usize,
) -> Result<PoristicCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut agreeing = 0;
    let mut max_error = 0.0f64;
    for _ in 0..starts {
        let start = Configuration::random(sides, &mut rng)?;
        let steps = expected.map_or(horizon, |k| k as usize);
        let orbit = darboux_orbit(&start, steps)?;
        max_error = orbit.iter().fold(max_error, |m, c| m.max(c.side_error()));
        let ret = first_return(&start, &start, steps)?;
        if ret == expected.map(|k| k as usize) {
            agreeing += 1;
        }
        if let Some(k) = expected {
            max_error = max_error.max(orbit[k as usize].distance(&start));
        }
    }
    Ok(PoristicCheck {
        starts,
        agreeing,
        max_error,
        passed: agreeing == starts,
    })
}

/// One closed-form periodicity condition evaluated exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormCheck {
    pub n: u32,
    pub condition: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn check(n: u32, condition: &str, lhs: ExactNumber, rhs: ExactNumber) -> ClosedFormCheck {
    ClosedFormCheck {
        n,
        condition: condition.into(),
        holds: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// `K₄` in the squared sides.
pub fn k4(q: &Squares) -> ExactNumber {
    let (a, b, c, d) = (&q.a, &q.b, &q.c, &q.d);
    let cd = &(c - d).pow(2);
    let t1 = &a.pow(3) * c;
    let t2 = &a.pow(2) * &(&(b * &(d - &(&n(2) * c))) - &(&n(2) * &(c * d)));
    let t3 = &(b * d) * &(&(&b.pow(2) - &(&n(2) * &(b * c))) + cd);
    let inner = &(&(&b.pow(2) * &(c - &(&n(2) * d)))
        - &(&(&n(2) * b) * &(&(&c.pow(2) - &(&n(4) * &(c * d))) + &d.pow(2))))
        + &(c * cd);
    let t4 = a * &inner;
    &(&(&t1 + &t2) + &t3) + &t4
}

/// `K₆` in the squared sides.
pub fn k6(q: &Squares) -> ExactNumber {
    let (a, b, c, d) = (&q.a, &q.b, &q.c, &q.d);
    let i = |v: i64| n(v);
    let cd = &(c - d).pow(2);
    let sum = |xs: Vec<ExactNumber>| xs.into_iter().sum::<ExactNumber>();
    let t1 = &(&a.pow(5) * c) * &(&(b * d) + &c.pow(2));
    let t2 = -(&(&a.pow(4) * c)
        * &sum(vec![
            &(&i(4) * &b.pow(2)) * d,
            b * &sum(vec![
                &i(2) * &c.pow(2),
                -(&i(3) * &(c * d)),
                &i(4) * &d.pow(2),
            ]),
            c.pow(3),
            &i(2) * &(&c.pow(2) * d),
        ]));
    let t3 = &(&a.pow(3) * c)
        * &sum(vec![
            &(&i(6) * &b.pow(3)) * d,
            &b.pow(2) * &sum(vec![c.pow(2), -(&i(10) * &(c * d)), &i(11) * &d.pow(2)]),
            -(&(&i(2) * b)
                * &sum(vec![
                    c.pow(3),
                    -(&i(9) * &(&c.pow(2) * d)),
                    &i(5) * &(c * &d.pow(2)),
                    -(&i(3) * &d.pow(3)),
                ])),
            &c.pow(2) * cd,
        ]);
    let t4 = &(&(&a.pow(2) * b) * d)
        * &sum(vec![
            &b.pow(2) * &sum(vec![&i(11) * &c.pow(2), -(&i(10) * &(c * d)), d.pow(2)]),
            -(&(&i(4) * &b.pow(3)) * c),
            -(&(&i(2) * b)
                * &sum(vec![
                    &i(5) * &c.pow(3),
                    -(&c.pow(2) * d),
                    &i(5) * &(c * &d.pow(2)),
                ])),
            &(&(&(&i(3) * c) - &(&i(4) * d)) * c) * cd,
        ]);
    let t5 = &(&(a * b) * d)
        * &sum(vec![
            &b.pow(4) * c,
            &b.pow(3)
                * &sum(vec![
                    &i(3) * &(c * d),
                    -(&i(4) * &c.pow(2)),
                    -(&i(2) * &d.pow(2)),
                ]),
            &(&i(2) * &b.pow(2))
                * &sum(vec![
                    &i(3) * &c.pow(3),
                    -(&i(5) * &(&c.pow(2) * d)),
                    &i(9) * &(c * &d.pow(2)),
                    -d.pow(3),
                ]),
            -(&(&(b * &(&(&i(4) * c) - &(&i(3) * d))) * c) * cd),
            c * &cd.pow(2),
        ]);
    let t6 =
        &(&b.pow(3) * &d.pow(3)) * &sum(vec![b.pow(2), -(b * &(&(&i(2) * c) + d)), cd.clone()]);
    sum(vec![t1, t2, t3, t4, t5, t6])
}

/// The closed-form conditions for `n = 2, …, 6`, each evaluated exactly.
pub fn closed_form_checks(l: &FourBarLink) -> Vec<ClosedFormCheck> {
    let q = l.squares();
    let (ac, bd, s) = (q.ac(), q.bd(), q.s());
    let m = &ac - &bd;
    let zero = ExactNumber::zero();
    let a5 = &m * &(&m.pow(2) - &(&bd * &s.pow(2)));
    let b5sq = &(&bd * &s.pow(2)) * &(&(&ac * &s.pow(2)) - &m.pow(2)).pow(2);
    vec![
        check(2, "a^2+c^2=b^2+d^2", &q.a + &q.c, &q.b + &q.d),
        check(
            3,
            "b^2d^2(a^2-b^2+c^2-d^2)^2=(a^2c^2-b^2d^2)^2",
            &bd * &s.pow(2),
            m.pow(2),
        ),
        check(4, "ac=bd", ac.clone(), bd.clone()),
        check(4, "K4=0", k4(&q), zero.clone()),
        check(5, "A^2=B^2", a5.pow(2), b5sq),
        check(
            6,
            "a^2c^2(a^2-b^2+c^2-d^2)^2=(a^2c^2-b^2d^2)^2",
            &ac * &s.pow(2),
            m.pow(2),
        ),
        check(6, "K6=0", k6(&q), zero),
    ]
}

/// Minimal `n ≤ 6` whose closed form holds, with the condition name.
pub fn closed_form_period(checks: &[ClosedFormCheck]) -> Option<(u32, String)> {
    checks
        .iter()
        .find(|c| c.holds)
        .map(|c| (c.n, c.condition.clone()))
}

/// Period and semi-period of the Darboux transformation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicityReport {
    pub sides: [String; 4],
    pub period: Option<u32>,
    pub semi_period: Option<u32>,
    /// `"closed form n=…: …"` or `"hankel"`.
    pub fired: String,
    pub closed_forms: Vec<ClosedFormCheck>,
    pub hankel: OrderVerdict,
    /// Closed-form and Hankel verdicts name the same `n` (or both nothing up to 6).
    pub agreement: bool,
    pub semi: SemiReport,
    pub poristic: PoristicCheck,
}

/// Periodicity of a link with a smooth correspondence.
pub fn periodicity(l: &FourBarLink, n_max: u32, oracle: bool) -> Result<PeriodicityReport> {
    let q = link_correspondence(l);
    if !q.curve_invariants()?.is_smooth() {
        return Err(QrtError::SingularCurve);
    }
    let checks = closed_form_checks(l);
    let closed = closed_form_period(&checks);
    let hankel = qrt_order(&q, n_max, oracle)?;
    let h = hankel.qrt_order();
    let agreement = match (&closed, h) {
        (Some((k, _)), h) => h == Some(*k),
        (None, Some(k)) => k > 6,
        (None, None) => true,
    };
    let (period, fired) = match &closed {
        Some((k, cond)) => (Some(*k), format!("closed form n={k}: {cond}")),
        None => (h, "hankel".to_string()),
    };
    let semi = link_semi_periodicity(l, n_max)?;
    let poristic = poristic_check(l.sides_f64(), period, 3 * n_max as usize, PORISTIC_STARTS)?;
    Ok(PeriodicityReport {
        sides: l.sides_text(),
        period,
        semi_period: semi.semi_period,
        fired,
        closed_forms: checks,
        hankel,
        agreement,
        semi,
        poristic,
    })
}

/// The correspondence induced on `(u, v) = (x², y²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryBiquadratic {
    pub curve: Biquadratic,
}

/// `Q̂` of a centrally symmetric `Q` with `a₁₁ ≠ 0`.
pub fn secondary(q: &Biquadratic) -> Result<SecondaryBiquadratic> {
    if !q.is_centrally_symmetric() {
        return Err(QrtError::Invalid(
            "the curve is not centrally symmetric".into(),
        ));
    }
    let a = |i, j| q.a(i, j);
    if a(1, 1).is_zero() {
        return Err(QrtError::Invalid(
            "a11 = 0: the secondary correspondence is degenerate".into(),
        ));
    }
    let two = n(2);
    let tw = |x: &ExactNumber, y: &ExactNumber| &two * &(x * y);
    let mid = &(&tw(a(2, 2), a(0, 0)) + &tw(a(0, 2), a(2, 0))) - &a(1, 1).pow(2);
    let curve = Biquadratic::new([
        [a(0, 0).pow(2), tw(a(0, 2), a(0, 0)), a(0, 2).pow(2)],
        [tw(a(2, 0), a(0, 0)), mid, tw(a(2, 2), a(0, 2))],
        [a(2, 0).pow(2), tw(a(2, 2), a(2, 0)), a(2, 2).pow(2)],
    ])?;
    Ok(SecondaryBiquadratic { curve })
}

/// Semi-period search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiReport {
    pub semi_period: Option<u32>,
    /// `(k, condition on Q̂, condition on Q)` for every tested `k`.
    pub checked: Vec<(u32, bool, bool)>,
    /// `ac = bd` (links only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_2: Option<bool>,
    /// `a²c²(a²−b²+c²−d²)² = (a²c²−b²d²)²` (links only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_3: Option<bool>,
    /// The closed forms agree with the search (links only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_forms_agree: Option<bool>,
    /// Starts whose `k`-th iterate is the mirror image across `V₁V₂` (links only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mirror_check: Option<PoristicCheck>,
}

/// Minimal `k ≤ k_max` with the order-`k` condition true on `Q̂` and false on `Q`.
pub fn semi_periodicity(q: &Biquadratic, k_max: u32) -> Result<SemiReport> {
    let qh = secondary(q)?.curve;
    let terms = k_max.max(2) as usize;
    let m = CubicModel::new(q, terms)?;
    let mh = CubicModel::new(&qh, terms)?;
    let mut checked = Vec::new();
    let mut semi_period = None;
    for k in 2..=k_max {
        let (hat, prim) = (mh.cayley_condition(k)?, m.cayley_condition(k)?);
        checked.push((k, hat, prim));
        if hat && !prim {
            semi_period = Some(k);
            break;
        }
    }
    Ok(SemiReport {
        semi_period,
        checked,
        closed_form_2: None,
        closed_form_3: None,
        closed_forms_agree: None,
        mirror_check: None,
    })
}

/// Semi-periodicity of a link, with the `k = 2, 3` closed forms and the mirror check.
pub fn link_semi_periodicity(l: &FourBarLink, k_max: u32) -> Result<SemiReport> {
    let mut rep = semi_periodicity(&link_correspondence(l), k_max)?;
    let q = l.squares();
    let (ac, bd, s) = (q.ac(), q.bd(), q.s());
    let periodic2 = (&q.a + &q.c) == (&q.b + &q.d);
    let periodic3 = &bd * &s.pow(2) == (&ac - &bd).pow(2);
    let c2 = ac == bd && !periodic2;
    let c3 = &ac * &s.pow(2) == (&ac - &bd).pow(2) && !periodic3;
    let agree = match rep.semi_period {
        Some(2) => c2,
        Some(3) => !c2 && c3,
        Some(_) | None => !c2 && !c3,
    };
    rep.closed_form_2 = Some(c2);
    rep.closed_form_3 = Some(c3);
    rep.closed_forms_agree = Some(agree);
    if let Some(k) = rep.semi_period {
        rep.mirror_check = Some(mirror_check(l.sides_f64(), k as usize, PORISTIC_STARTS)?);
    }
    Ok(rep)
}

/// Every start's `k`-th iterate is its mirror image across `V₁V₂`.
pub fn mirror_check(sides: [f64; 4], k: usize, starts: usize) -> Result<PoristicCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5e41);
    let mut agreeing = 0;
    let mut max_error = 0.0f64;
    for _ in 0..starts {
        let start = Configuration::random(sides, &mut rng)?;
        let end = *darboux_orbit(&start, k)?.last().expect("nonempty");
        let err = end.distance(&start.mirrored());
        max_error = max_error.max(err);
        if err < CLOSURE_TOL * start.scale() {
            agreeing += 1;
        }
    }
    Ok(PoristicCheck {
        starts,
        agreeing,
        max_error,
        passed: agreeing == starts,
    })
}

/// Which two sides sum to the half-perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PitotRelation {
    #[serde(rename = "a+c=b+d")]
    AcBd,
    #[serde(rename = "a+b=c+d")]
    AbCd,
    #[serde(rename = "a+d=b+c")]
    AdBc,
}

/// Shape of a link with a Pitot relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PitotShape {
    Rhombus,
    Kite,
    Parallelogram,
    /// Irreducible curve with a node or a cusp.
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PitotReport {
    pub relation: PitotRelation,
    pub shape: PitotShape,
    pub analysis: OrderAnalysis,
    /// `bd/((a−d)(a−b))` for `a+c = b+d`, `bd/((d−a)(a+b))` for `a+b = c+d`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_ratio: Option<String>,
    /// The ratio lies in `[0, 1]`, which the periodicity test needs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_in_unit_interval: Option<bool>,
    /// The printed ratio equals the one measured at the normalized double point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_agrees: Option<bool>,
    /// Geometric orbits from random starts; only run on the irreducible shape, since the
    /// switches are undefined along line components.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<PoristicCheck>,
    pub horizon: usize,
}

/// Pitot relation of a link, if any.
pub fn pitot_relation(l: &FourBarLink) -> Option<PitotRelation> {
    let (a, b, c, d) = (&l.a, &l.b, &l.c, &l.d);
    if a + c == b + d {
        Some(PitotRelation::AcBd)
    } else if a + b == c + d {
        Some(PitotRelation::AbCd)
    } else if a + d == b + c {
        Some(PitotRelation::AdBc)
    } else {
        None
    }
}

/// Singular analysis of a link with a Pitot relation.
pub fn pitot_analysis(l: &FourBarLink, n_max: u32) -> Result<PitotReport> {
    let relation = pitot_relation(l)
        .ok_or_else(|| QrtError::Invalid("no two sides sum to the half-perimeter".into()))?;
    let (a, b, c, d) = (&l.a, &l.b, &l.c, &l.d);
    let shape = if a == b && b == c && c == d {
        PitotShape::Rhombus
    } else if (a == b && c == d) || (a == d && b == c) {
        PitotShape::Kite
    } else if a == c && b == d {
        PitotShape::Parallelogram
    } else {
        PitotShape::General
    };
    let analysis = analyze_order(&link_correspondence(l), n_max, false)?;
    let printed = match relation {
        PitotRelation::AcBd => Some((b * d, &(a - d) * &(a - b))),
        PitotRelation::AbCd => Some((b * d, &(d - a) * &(a + b))),
        PitotRelation::AdBc => None,
    };
    let printed = printed
        .filter(|(_, den)| !den.is_zero())
        .map(|(num, den)| &num / &den);
    let in_unit = printed
        .as_ref()
        .map(|r| !r.is_negative() && !(r - &n(1)).is_positive());
    let measured = analysis.double_point.as_ref().map(|dp| dp.ratio.clone());
    let ratio_agrees = match (&printed, &measured) {
        (Some(p), Some(m)) if shape == PitotShape::General => Some(p.to_string() == *m),
        _ => None,
    };
    let horizon = 3 * n_max as usize;
    let expected = match analysis.verdict.kind {
        OrderKind::Finite { n } => Some(n),
        _ => None,
    };
    let numeric = match shape {
        PitotShape::General => Some(poristic_check(
            l.sides_f64(),
            expected,
            horizon,
            PORISTIC_STARTS,
        )?),
        _ => None,
    };
    Ok(PitotReport {
        relation,
        shape,
        printed_ratio: printed.map(|r| r.to_string()),
        ratio_in_unit_interval: in_unit,
        ratio_agrees,
        analysis,
        numeric,
        horizon,
    })
}

/// True when the analysis found an irreducible node.
pub fn is_node(rep: &PitotReport) -> bool {
    rep.analysis.class.case == Case::I
        && rep
            .analysis
            .double_point
            .as_ref()
            .is_some_and(|dp| dp.kind == PointKind::Node)
}

/// Diagonal walk whose kernel is `L/λ`: `p₀₀ = (8bd+λ)/λ`, `p_jk = ((a+jb+kd)²−c²)/λ`.
pub fn link_to_walk(l: &FourBarLink, lambda: &ExactNumber) -> Result<WalkSpec> {
    if lambda.is_zero() {
        return Err(QrtError::Invalid("lambda must be nonzero".into()));
    }
    let c2 = l.c.pow(2);
    let mut w = Vec::new();
    for j in [-1i8, 1] {
        for k in [-1i8, 1] {
            let s = &(&(&l.a + &(&n(j as i64) * &l.b)) + &(&n(k as i64) * &l.d)).pow(2) - &c2;
            w.push((j, k, &s / lambda));
        }
    }
    w.push((0, 0, &(&(&(&n(8) * &l.b) * &l.d) + lambda) / lambda));
    WalkSpec::from_weights(&w, false)
}

/// Intermediate quantities of the inverse conversion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseData {
    /// `None` when the limit convention replaced the ratio.
    pub q1: Option<String>,
    pub q2: Option<String>,
    /// `(q₁+1)/(1−q₁)` and `(q₂+1)/(q₂−1)` after the limit conventions.
    pub r1: String,
    pub r2: String,
}

/// Link whose correspondence is `λ` times the kernel of a diagonal walk.
pub fn walk_to_link(
    w: &WalkSpec,
    lambda: &ExactNumber,
    ctx: &TowerContext,
) -> Result<(FourBarLink, InverseData)> {
    if !w.is_diagonal() {
        return Err(QrtError::Invalid(
            "the walk is not diagonal (p_j0 = p_0j = 0 is required)".into(),
        ));
    }
    if lambda.is_zero() {
        return Err(QrtError::Invalid("lambda must be nonzero".into()));
    }
    let p = |j, k| w.p(j, k).clone();
    let one = n(1);
    let (q1, r1) = if p(-1, -1) == p(1, 1) {
        (None, -&one)
    } else {
        let q1 = &(&p(-1, 1) - &p(1, -1)) / &(&p(-1, -1) - &p(1, 1));
        if q1 == one || q1 == -&one {
            return Err(QrtError::Invalid(format!(
                "q1 = {q1}: the formulas divide by zero"
            )));
        }
        let r1 = &(&q1 + &one) / &(&one - &q1);
        (Some(q1), r1)
    };
    let (q2, r2) = if p(-1, -1) == p(-1, 1) {
        (None, one.clone())
    } else {
        let q2 = &(&p(1, -1) - &p(1, 1)) / &(&p(-1, -1) - &p(-1, 1));
        if q2 == one {
            return Err(QrtError::Invalid(
                "q2 = 1: the formulas divide by zero".into(),
            ));
        }
        let r2 = &(&q2 + &one) / &(&q2 - &one);
        (Some(q2), r2)
    };
    let base = &(&(lambda * &(&p(0, 0) - &one)) * &r1) / &n(8);
    let root = |x: &ExactNumber, what: &str| -> Result<ExactNumber> {
        if !x.is_positive() {
            return Err(QrtError::Invalid(format!(
                "{what} = {x} is not positive: no real link for this lambda"
            )));
        }
        Ok(ctx.sqrt(x)?)
    };
    let b = root(&base, "b^2")?;
    let d = root(&(&(&(lambda * &(&p(0, 0) - &one)) / &r1) / &n(8)), "d^2")?;
    let a = &r2 * &b;
    let k = &(&r2 - &one) - &(&one / &r1);
    let c = root(
        &(lambda * &(&(&base / lambda) * &k.pow(2) - &p(-1, -1))),
        "c^2",
    )?;
    let data = InverseData {
        q1: q1.map(|q| q.to_string()),
        q2: q2.map(|q| q.to_string()),
        r1: r1.to_string(),
        r2: r2.to_string(),
    };
    Ok((FourBarLink::new(a, b, c, d)?, data))
}

/// Styling constants for [`render_orbit`]: pixels per unit, gap between polygons,
/// margin, vertex radius, label font size.
const SVG_UNIT: f64 = 60.0;
const SVG_GAP: f64 = 0.6;
const SVG_MARGIN: f64 = 20.0;
const SVG_DOT: f64 = 2.5;
const SVG_FONT: f64 = 11.0;

/// SVG strip of `cfg` and its next `steps` Darboux images, left to right.
pub fn render_orbit_svg(cfg: &Configuration, steps: usize) -> Result<String> {
    let orbit = darboux_orbit(cfg, steps)?;
    let polys: Vec<[[f64; 2]; 4]> = orbit.iter().map(|c| [c.v1(), c.v2(), c.v3, c.v4]).collect();
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in polys.iter().flatten() {
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let mut body = String::new();
    let mut offset = 0.0;
    for (i, poly) in polys.iter().enumerate() {
        let xmin = poly.iter().fold(f64::INFINITY, |m, p| m.min(p[0]));
        let xmax = poly.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p[0]));
        let px = |p: [f64; 2]| {
            (
                SVG_MARGIN + (offset + p[0] - xmin) * SVG_UNIT,
                SVG_MARGIN + (ymax - p[1]) * SVG_UNIT,
            )
        };
        let pts: Vec<String> = poly
            .iter()
            .map(|p| px(*p))
            .map(|(x, y)| format!("{x:.3},{y:.3}"))
            .collect();
        let _ = writeln!(body, "  <g id=\"step{i}\">");
        let _ = writeln!(
            body,
            "    <polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        );
        for (k, p) in poly.iter().enumerate() {
            let (x, y) = px(*p);
            let _ = writeln!(
                body,
                "    <circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{SVG_DOT}\"/>"
            );
            let _ = writeln!(
                body,
                "    <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"{SVG_FONT}\">V{}</text>",
                x + 3.0,
                y - 3.0,
                k + 1
            );
        }
        let _ = writeln!(body, "  </g>");
        offset += xmax - xmin + SVG_GAP;
    }
    let width = 2.0 * SVG_MARGIN + (offset - SVG_GAP).max(0.0) * SVG_UNIT;
    let height = 2.0 * SVG_MARGIN + (ymax - ymin) * SVG_UNIT;
    Ok(format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width:.3}\" height=\"{height:.3}\" viewBox=\"0 0 {width:.3} {height:.3}\">\n{body}</svg>\n"
    ))
}

/// Writes [`render_orbit_svg`] to `path`.
pub fn render_orbit(cfg: &Configuration, steps: usize, path: &std::path::Path) -> Result<()> {
    let svg = render_orbit_svg(cfg, steps)?;
    std::fs::write(path, svg).map_err(|e| QrtError::Io(format!("{}: {e}", path.display())))
}
