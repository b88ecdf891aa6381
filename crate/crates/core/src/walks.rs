//! Random walks in the quarter plane: kernels, the determinant tests for small group
//! orders, drift and correlation, and the step-set harness.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biquad::Biquadratic;
use crate::cubic::{qrt_order, CubicModel, OrderKind};
use crate::error::{QrtError, Result};
use crate::numbers::{parse_number, recognize_cos_squared, CosSquared, ExactNumber, TowerContext};
use crate::poly::det_bareiss;
use crate::singular::{analyze_order, OrderRoute};

fn n(v: i64) -> ExactNumber {
    ExactNumber::from_int(v)
}

/// Step weights `p_jk`, `j` the x-step and `k` the y-step.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec {
    p: [[ExactNumber; 3]; 3],
    pub strict: bool,
}

impl WalkSpec {
    /// `p[j + 1][k + 1] = p_jk`. Strict walks must be stochastic.
    pub fn new(p: [[ExactNumber; 3]; 3], strict: bool) -> Result<Self> {
        let w = WalkSpec { p, strict };
        if strict {
            if let Some((j, k)) = w.steps().find(|&(j, k)| w.p(j, k).is_negative()) {
                return Err(QrtError::Invalid(format!(
                    "p[{j},{k}] = {} is negative",
                    w.p(j, k)
                )));
            }
            let total = w.total();
            if !total.is_one() {
                return Err(QrtError::Invalid(format!("weights sum to {total}, not 1")));
            }
        }
        Ok(w)
    }

    /// Builds a walk from `(j, k, p_jk)` triples; unspecified weights are zero.
    pub fn from_weights(weights: &[(i8, i8, ExactNumber)], strict: bool) -> Result<Self> {
        let mut p: [[ExactNumber; 3]; 3] = Default::default();
        for (j, k, v) in weights {
            if j.abs() > 1 || k.abs() > 1 {
                return Err(QrtError::Invalid(format!(
                    "step ({j},{k}) is not a small step"
                )));
            }
            p[(j + 1) as usize][(k + 1) as usize] = v.clone();
        }
        Self::new(p, strict)
    }

    /// Four weights 1/4 on the axes.
    pub fn simple() -> Self {
        let q = ExactNumber::from_ratio(1, 4);
        Self::from_weights(
            &[
                (1, 0, q.clone()),
                (-1, 0, q.clone()),
                (0, 1, q.clone()),
                (0, -1, q),
            ],
            true,
        )
        .expect("simple walk is stochastic")
    }

    pub fn p(&self, j: i8, k: i8) -> &ExactNumber {
        &self.p[(j + 1) as usize][(k + 1) as usize]
    }

    fn steps(&self) -> impl Iterator<Item = (i8, i8)> {
        (-1..=1).flat_map(|j| (-1..=1).map(move |k| (j, k)))
    }

    pub fn total(&self) -> ExactNumber {
        self.steps().map(|(j, k)| self.p(j, k).clone()).sum()
    }

    /// Nonnegative weights summing to one.
    pub fn is_stochastic(&self) -> bool {
        self.steps().all(|(j, k)| !self.p(j, k).is_negative()) && self.total().is_one()
    }

    /// Only the four diagonal steps and the stay weight may be nonzero.
    pub fn is_diagonal(&self) -> bool {
        [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .all(|&(j, k)| self.p(j, k).is_zero())
    }

    pub fn from_json(text: &str, ctx: &TowerContext) -> Result<Self> {
        let file: WalkFile =
            serde_json::from_str(text).map_err(|e| QrtError::Invalid(format!("walk file: {e}")))?;
        let mut weights = Vec::new();
        for (key, value) in &file.p {
            let (j, k) = parse_step_key(key)?;
            let v = parse_number(value, ctx)
                .map_err(|e| QrtError::Invalid(format!("p[{key}]: {e}")))?;
            weights.push((j, k, v));
        }
        Self::from_weights(&weights, file.strict)
    }

    pub fn to_json(&self) -> String {
        let p = self
            .steps()
            .filter(|&(j, k)| !self.p(j, k).is_zero())
            .map(|(j, k)| (format!("{j},{k}"), self.p(j, k).to_string()))
            .collect();
        serde_json::to_string(&WalkFile {
            p,
            strict: self.strict,
        })
        .expect("serializing strings cannot fail")
    }
}

/// Wire form of a walk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkFile {
    pub p: BTreeMap<String, String>,
    #[serde(default)]
    pub strict: bool,
}

fn parse_step_key(key: &str) -> Result<(i8, i8)> {
    let bad = || QrtError::Invalid(format!("step key {key:?} is not of the form \"j,k\""));
    let (j, k) = key.split_once(',').ok_or_else(bad)?;
    let j: i8 = j.trim().parse().map_err(|_| bad())?;
    let k: i8 = k.trim().parse().map_err(|_| bad())?;
    if j.abs() > 1 || k.abs() > 1 {
        return Err(bad());
    }
    Ok((j, k))
}

/// `Q_P = xy(Σ p_jk x^j y^k − 1)`.
pub fn kernel(w: &WalkSpec) -> Result<Biquadratic> {
    let mut a = w.p.clone();
    a[1][1] = &a[1][1] - &ExactNumber::one();
    Biquadratic::new(a)
}

/// The two-coupled processor kernel `xy·T(x, y)` with arrival rates `λ` and service rates `μ`.
pub fn coupled_processor_kernel(
    l1: &ExactNumber,
    l2: &ExactNumber,
    m1: &ExactNumber,
    m2: &ExactNumber,
) -> Result<Biquadratic> {
    let mut a: [[ExactNumber; 3]; 3] = Default::default();
    a[1][1] = &(&(l1 + l2) + m1) + m2;
    a[2][1] = -l1.clone();
    a[1][2] = -l2.clone();
    a[0][1] = -m1.clone();
    a[1][0] = -m2.clone();
    Biquadratic::new(a)
}

/// A set of small steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSet {
    pub name: String,
    pub steps: Vec<(i8, i8)>,
    /// `true` for the sets shipped with the crate.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub bundled: bool,
}

const BUNDLED: &str = include_str!("../data/step_sets.json");

/// The bundled step sets `S1, S17 … S23`.
pub fn bundled_step_sets() -> Vec<StepSet> {
    let mut sets: Vec<StepSet> = serde_json::from_str(BUNDLED).expect("bundled dataset is valid");
    for s in &mut sets {
        s.bundled = true;
    }
    sets
}

pub fn step_set(name: &str) -> Option<StepSet> {
    bundled_step_sets()
        .into_iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
}

impl StepSet {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: StepSet =
            serde_json::from_str(text).map_err(|e| QrtError::Invalid(format!("step set: {e}")))?;
        s.validate()?;
        Ok(StepSet {
            bundled: false,
            ..s
        })
    }

    fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(QrtError::Invalid(format!(
                "step set {} is empty",
                self.name
            )));
        }
        for &(i, j) in &self.steps {
            if i.abs() > 1 || j.abs() > 1 || (i, j) == (0, 0) {
                return Err(QrtError::Invalid(format!(
                    "step ({i},{j}) is not a nonzero small step"
                )));
            }
        }
        Ok(())
    }

    /// `xy·S(x, y)`.
    pub fn xys(&self) -> Result<Biquadratic> {
        let mut a: [[ExactNumber; 3]; 3] = Default::default();
        for &(i, j) in &self.steps {
            let slot = &mut a[(i + 1) as usize][(j + 1) as usize];
            *slot = &*slot + &ExactNumber::one();
        }
        Biquadratic::new(a)
    }

    /// `𝒦_t: xy(1 − t·S(x, y))`.
    pub fn k_t(&self, t: &ExactNumber) -> Result<Biquadratic> {
        let s = self.xys()?;
        let mut a: [[ExactNumber; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| -(s.a(i, j) * t)));
        a[1][1] = &a[1][1] + &ExactNumber::one();
        Biquadratic::new(a)
    }
}

/// `M_Q`, the cofactor matrices `Δ_Q` and `Ω_Q`, and the scalars used for order ten.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderMatrices {
    pub m_q: [[ExactNumber; 3]; 3],
    /// `cof[i][j] = Δ_{i+1, j+1}`, the cofactors of `M_Q`.
    pub cof: [[ExactNumber; 3]; 3],
    pub delta: [[ExactNumber; 4]; 4],
    pub omega: [[ExactNumber; 3]; 3],
    pub det: ExactNumber,
    pub det_delta: ExactNumber,
    pub det_omega: ExactNumber,
    pub x_hat: ExactNumber,
    pub b1_hat: ExactNumber,
    pub c1_hat: ExactNumber,
}

// Monomials in `a_ij`: (numerator, denominator, factors written as `ij` pairs).
type Monomial = (i64, i64, &'static str);

const X_HAT: &[Monomial] = &[
    (2, 1, "02 00 21 21"),
    (-4, 1, "02 00 20 22"),
    (-2, 1, "02 01 20 21"),
    (2, 1, "02 10 10 22"),
    (-1, 1, "02 10 11 21"),
    (-2, 1, "02 10 12 20"),
    (1, 1, "02 11 11 20"),
    (-2, 1, "01 00 21 22"),
    (-1, 1, "01 10 11 22"),
    (2, 1, "01 10 12 21"),
    (-1, 1, "01 11 12 20"),
    (2, 1, "01 01 20 22"),
    (2, 1, "02 02 20 20"),
    (2, 1, "00 00 22 22"),
    (1, 1, "00 22 11 11"),
    (-2, 1, "00 12 10 22"),
    (-1, 1, "00 12 11 21"),
    (2, 1, "00 12 12 20"),
];

const B1_HAT: &[Monomial] = &[
    (8, 1, "00 22"),
    (-4, 1, "01 21"),
    (8, 1, "02 20"),
    (-4, 1, "10 12"),
    (1, 1, "11 11"),
];

const C1_HAT: &[Monomial] = &[
    (1, 1, "11 11 01 21"),
    (-4, 1, "11 11 00 22"),
    (-4, 1, "11 11 02 20"),
    (1, 1, "11 11 10 12"),
    (-1, 8, "11 11 11 11"),
    (2, 1, "11 00 12 21"),
    (2, 1, "11 01 10 22"),
    (2, 1, "11 01 12 20"),
    (2, 1, "11 02 10 21"),
    (-12, 1, "00 00 22 22"),
    (12, 1, "10 12 00 22"),
    (-8, 1, "10 12 01 21"),
    (12, 1, "10 12 02 20"),
    (-8, 1, "00 02 20 22"),
    (12, 1, "00 01 21 22"),
    (-4, 1, "00 02 21 21"),
    (-4, 1, "00 12 12 20"),
    (-4, 1, "01 01 20 22"),
    (-2, 1, "01 01 21 21"),
    (12, 1, "01 02 20 21"),
    (-12, 1, "02 02 20 20"),
    (-4, 1, "10 10 02 22"),
    (-2, 1, "10 10 12 12"),
];

fn eval_monomials(q: &Biquadratic, terms: &[Monomial]) -> ExactNumber {
    terms
        .iter()
        .map(|&(num, den, factors)| {
            factors
                .split(' ')
                .fold(ExactNumber::from_ratio(num, den), |acc, f| {
                    let b = f.as_bytes();
                    &acc * q.a((b[0] - b'0') as usize, (b[1] - b'0') as usize)
                })
        })
        .sum()
}

/// Builds every matrix and scalar of the small-order tests from `a_ij`.
pub fn order_matrices(q: &Biquadratic) -> OrderMatrices {
    let m = q.m_q();
    let cof: [[ExactNumber; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let minor = &(&m[rows[0]][cols[0]] * &m[rows[1]][cols[1]])
                - &(&m[rows[0]][cols[1]] * &m[rows[1]][cols[0]]);
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
    });
    let d = |i: usize, j: usize| cof[i - 1][j - 1].clone();
    let delta = [
        [d(1, 1), d(2, 1), d(1, 2), d(2, 2)],
        [d(1, 2), d(2, 2), d(1, 3), d(2, 3)],
        [d(2, 1), d(3, 1), d(2, 2), d(3, 2)],
        [d(2, 2), d(3, 2), d(2, 3), d(3, 3)],
    ];
    let pr = |a: (usize, usize), b: (usize, usize)| &d(a.0, a.1) * &d(b.0, b.1);
    let two = n(2);
    let m1 = &(&(&two * &pr((2, 2), (3, 2))) - &pr((2, 1), (3, 3))) - &pr((2, 3), (3, 1));
    let m2 = &(&pr((1, 1), (3, 3))
        - &(&two * &(&(&pr((1, 2), (3, 2)) - &pr((2, 1), (2, 3))) + &pr((2, 2), (2, 2)))))
        + &pr((1, 3), (3, 1));
    let m3 = &(&(&two * &pr((1, 2), (2, 2))) - &pr((1, 1), (2, 3))) - &pr((1, 3), (2, 1));
    let omega = [
        [m1, m2, m3],
        [
            &pr((3, 2), (3, 2)) - &pr((3, 1), (3, 3)),
            &(&pr((2, 1), (3, 3)) - &(&two * &pr((2, 2), (3, 2)))) + &pr((2, 3), (3, 1)),
            &pr((2, 2), (2, 2)) - &pr((2, 1), (2, 3)),
        ],
        [
            &pr((2, 2), (2, 2)) - &pr((2, 1), (2, 3)),
            &(&pr((1, 1), (2, 3)) - &(&two * &pr((1, 2), (2, 2)))) + &pr((1, 3), (2, 1)),
            &pr((1, 2), (1, 2)) - &pr((1, 1), (1, 3)),
        ],
    ];
    let det_delta = det_bareiss(&delta.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let det_omega = det_bareiss(&omega.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    OrderMatrices {
        m_q: m,
        cof,
        delta,
        omega,
        det: q.det(),
        det_delta,
        det_omega,
        x_hat: eval_monomials(q, X_HAT),
        b1_hat: eval_monomials(q, B1_HAT),
        c1_hat: eval_monomials(q, C1_HAT),
    }
}

impl OrderMatrices {
    /// `C₂ = 2·det Δ_Q / det³`; requires `det ≠ 0`.
    pub fn c2(&self) -> ExactNumber {
        &(&n(2) * &self.det_delta) / &self.det.pow(3)
    }

    /// `C₃ = −2·det Ω_Q / det⁵`; requires `det ≠ 0`.
    pub fn c3(&self) -> ExactNumber {
        &(&n(-2) * &self.det_omega) / &self.det.pow(5)
    }

    /// `C₄` from `X̂, B̂₁, Ĉ₁`; requires `det ≠ 0`.
    pub fn c4(&self) -> ExactNumber {
        let x2 = &self.x_hat * &self.x_hat;
        let t1 = &(&ExactNumber::from_ratio(-5, 8) * &(&x2 * &x2)) / &self.det.pow(7);
        let t2 = &(&ExactNumber::from_ratio(3, 4) * &(&self.b1_hat * &x2)) / &self.det.pow(5);
        let t3 = &self.c1_hat / &self.det.pow(3);
        &(&t1 + &t2) + &t3
    }

    /// `2·det(Ω_Q)² / (det(Δ_Q)·det⁷)`; requires both determinants nonzero.
    pub fn order10_lhs(&self) -> ExactNumber {
        &(&n(2) * &self.det_omega.pow(2)) / &(&self.det_delta * &self.det.pow(7))
    }

    /// `2·det(Ω_Q)²/det(Δ_Q) − det⁴·Ĉ₁`, the quantity under the order-ten square root.
    fn order10_core(&self) -> ExactNumber {
        &(&(&n(2) * &self.det_omega.pow(2)) / &self.det_delta) - &(&self.det.pow(4) * &self.c1_hat)
    }
}

/// Real-case side conditions for order ten; reported, not used as gates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Order10Diagnostics {
    /// `det²B̂₁² ≥ (40/9)(2detΩ²/detΔ − det⁴Ĉ₁)`
    pub discriminant_ok: bool,
    /// `B̂₁ ≥ 0` or `Ĉ₁ ≥ 2detΩ²/(detΔ·det⁴)`
    pub nonnegative_root_ok: bool,
    /// `5X̂²`
    pub lhs: f64,
    /// `3·det·B̂₁ + √(…)` and `3·det·B̂₁ − √(…)`; `None` when the radicand is negative.
    pub branches: [Option<f64>; 2],
    /// Which branches agree with `5X̂²` to 1e-9 (relative).
    pub branch_matches: [bool; 2],
}

fn order10_diagnostics(om: &OrderMatrices) -> Order10Diagnostics {
    let core = om.order10_core();
    let db = &om.det * &om.b1_hat;
    let disc = &(&n(9) * &(&db * &db)) - &(&n(40) * &core);
    let discriminant_ok =
        !(&(&db * &db) - &(&ExactNumber::from_ratio(40, 9) * &core)).is_negative();
    let bound = &(&n(2) * &om.det_omega.pow(2)) / &(&om.det_delta * &om.det.pow(4));
    let nonnegative_root_ok = !om.b1_hat.is_negative() || !(&om.c1_hat - &bound).is_negative();
    let lhs = (&n(5) * &(&om.x_hat * &om.x_hat)).to_f64();
    let base = (&n(3) * &db).to_f64();
    let root = if disc.is_negative() {
        None
    } else {
        Some(disc.to_f64().sqrt())
    };
    let branches = [root.map(|r| base + r), root.map(|r| base - r)];
    let close = |v: Option<f64>| v.is_some_and(|v| (v - lhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    Order10Diagnostics {
        discriminant_ok,
        nonnegative_root_ok,
        lhs,
        branches,
        branch_matches: branches.map(close),
    }
}

/// A closed-form group-order test with the quantity it evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub k: u32,
    /// The group has order exactly `k`.
    pub holds: bool,
    pub certificate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Order10Diagnostics>,
}

/// Decides `|group| = k` for `k ∈ {4, 6, 8, 10}` from the determinant conditions.
///
/// The tests for 6, 8 and 10 divide by `det`, and the one for 10 also by `det Δ_Q`. When a
/// divisor vanishes the order is already known to be 4 or 6, which is what the certificate says.
pub fn closed_form_group_order(q: &Biquadratic, k: u32) -> Result<ClosedForm> {
    if !q.curve_invariants()?.is_smooth() {
        return Err(QrtError::SingularCurve);
    }
    let om = order_matrices(q);
    let lower = |holds: bool, why: String| {
        Ok(ClosedForm {
            k,
            holds,
            certificate: why,
            diagnostics: None,
        })
    };
    match k {
        4 => lower(om.det.is_zero(), format!("det(a) = {}", om.det)),
        6 | 8 | 10 if om.det.is_zero() => {
            lower(false, "det(a) = 0, so the group has order 4".into())
        }
        6 => lower(
            om.det_delta.is_zero(),
            format!("det(Delta_Q) = {}", om.det_delta),
        ),
        8 => lower(
            om.det_omega.is_zero(),
            format!("det(Omega_Q) = {}", om.det_omega),
        ),
        10 if om.det_delta.is_zero() => {
            lower(false, "det(Delta_Q) = 0, so the group has order 6".into())
        }
        10 => {
            let lhs = om.order10_lhs();
            let c4 = om.c4();
            let diff = &lhs - &c4;
            Ok(ClosedForm {
                k,
                holds: diff.is_zero(),
                certificate: format!("2 det(Omega_Q)^2/(det(Delta_Q) det(a)^7) - C4 = {diff}"),
                diagnostics: Some(order10_diagnostics(&om)),
            })
        }
        _ => Err(QrtError::Invalid(format!(
            "closed forms exist for k in {{4, 6, 8, 10}}, not {k}"
        ))),
    }
}

/// Drift, correlation and angle of a walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkDiagnostics {
    pub drift: (String, String),
    pub zero_drift: bool,
    /// `R` when the second-moment root is exact.
    pub correlation_exact: Option<String>,
    pub correlation: f64,
    /// `R²`, always exact.
    pub correlation_squared: String,
    pub theta: f64,
    pub theta_over_pi: f64,
    /// `2·min{ℓ : ℓθ/π ∈ ℤ}` when `θ/π` is recognized as rational.
    pub group_order: Option<u32>,
}

/// `M`, `R` and `θ = arccos(−R)`.
pub fn walk_diagnostics(w: &WalkSpec, n_max: u32, digits: u32) -> Result<WalkDiagnostics> {
    let sum = |f: &dyn Fn(i64, i64) -> i64| -> ExactNumber {
        w.steps()
            .map(|(j, k)| &n(f(j as i64, k as i64)) * w.p(j, k))
            .sum()
    };
    let mx = sum(&|j, _| j);
    let my = sum(&|_, k| k);
    let cov = sum(&|j, k| j * k);
    let vx = sum(&|j, _| j * j);
    let vy = sum(&|_, k| k * k);
    let var = &vx * &vy;
    if !var.is_positive() {
        return Err(QrtError::Degenerate(
            "a second moment of the walk vanishes".into(),
        ));
    }
    let r2 = &(&cov * &cov) / &var;
    let exact = var.sqrt_exact().map(|s| &cov / &s);
    let r = exact
        .as_ref()
        .map_or_else(|| cov.to_f64() / var.to_f64().sqrt(), |r| r.to_f64());
    let theta = (-r).clamp(-1.0, 1.0).acos();
    let group_order = match recognize_cos_squared(&r2, n_max, digits) {
        CosSquared::Periodic { n, .. } => Some(2 * n),
        _ => None,
    };
    Ok(WalkDiagnostics {
        zero_drift: mx.is_zero() && my.is_zero(),
        drift: (mx.to_string(), my.to_string()),
        correlation_exact: exact.map(|r| r.to_string()),
        correlation: r,
        correlation_squared: r2.to_string(),
        theta,
        theta_over_pi: theta / std::f64::consts::PI,
        group_order,
    })
}

/// Group order of `𝒦_t` at one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TSample {
    pub t: String,
    pub route: OrderRoute,
    pub case: String,
    pub group_order: Option<u32>,
    pub certificate: String,
}

/// Orders of `W(S)` and `ℋ(S, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinatoricsReport {
    pub step_set: String,
    pub w_case: String,
    pub w_group_order: Option<u32>,
    pub w_note: String,
    pub samples: Vec<TSample>,
    /// All samples give the same group order.
    pub t_independent: bool,
}

/// Default `t` samples.
pub fn default_t_samples() -> Vec<ExactNumber> {
    vec![
        ExactNumber::from_ratio(1, 5),
        ExactNumber::from_ratio(1, 3),
        ExactNumber::from_ratio(2, 7),
    ]
}

/// Runs `W(S)` and `ℋ(S, t)`; singular `𝒦_t` are routed through the singular pipeline.
pub fn combinatorics_suite(
    s: &StepSet,
    ts: &[ExactNumber],
    n_max: u32,
) -> Result<CombinatoricsReport> {
    let w = analyze_order(&s.xys()?, n_max, false)?;
    let w_note = match w.route {
        OrderRoute::LineComponent => format!(
            "xyS has a line component ({}), the QRT map is undefined",
            w.class.components_summary()
        ),
        _ => w.verdict.certificate.clone(),
    };
    let samples = ts
        .par_iter()
        .map(|t| -> Result<TSample> {
            if t.is_zero() {
                return Err(QrtError::Invalid("t = 0 gives the curve xy = 0".into()));
            }
            let a = analyze_order(&s.k_t(t)?, n_max, false)?;
            Ok(TSample {
                t: t.to_string(),
                route: a.route,
                case: a.class.case.label().into(),
                group_order: a.verdict.group_order,
                certificate: a.verdict.certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let t_independent = samples
        .windows(2)
        .all(|p| p[0].group_order == p[1].group_order);
    Ok(CombinatoricsReport {
        step_set: s.name.clone(),
        w_case: w.class.case.label().into(),
        w_group_order: w.verdict.group_order,
        w_note,
        samples,
        t_independent,
    })
}

/// Group order by the Hankel route on `(g2, g3, X, Y)` without a smoothness check.
///
/// On a genus-zero curve the translation acts on the smooth locus of the nodal cubic,
/// so the same Cayley conditions apply as long as `(X, Y)` is not the node.
pub fn hankel_group_order_unchecked(q: &Biquadratic, n_max: u32) -> Result<Option<u32>> {
    let inv = q.curve_invariants()?;
    let model = CubicModel::from_parts(
        inv.d,
        inv.e,
        crate::cubic::translation_x(q),
        q.det(),
        n_max as usize,
    );
    let v = crate::cubic::order_from_model(&model, n_max)?;
    Ok(v.group_order)
}

/// Closed-form verdict next to the Hankel verdict, for reports.
pub fn closed_form_agrees(q: &Biquadratic, k: u32, n_max: u32) -> Result<bool> {
    let cf = closed_form_group_order(q, k)?;
    let v = qrt_order(q, n_max, false)?;
    let hankel = matches!(v.kind, OrderKind::Finite { .. }) && v.group_order == Some(k);
    Ok(cf.holds == hankel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> ExactNumber {
        ExactNumber::from_ratio(a, b)
    }

    #[test]
    fn simple_walk_kernel() {
        let q = kernel(&WalkSpec::simple()).unwrap();
        for (i, j) in [(2, 1), (1, 2), (1, 0), (0, 1)] {
            assert_eq!(q.a(i, j), &r(1, 4));
        }
        assert_eq!(q.a(1, 1), &n(-1));
        assert!(q.a(0, 0).is_zero() && q.a(2, 2).is_zero());
    }

    #[test]
    fn strict_mode_is_enforced() {
        let bad = WalkSpec::from_weights(&[(1, 0, r(1, 2)), (0, 1, r(1, 3))], true);
        assert!(matches!(bad, Err(QrtError::Invalid(_))));
        let neg = WalkSpec::from_weights(&[(1, 0, r(3, 2)), (0, 1, r(-1, 2))], true);
        assert!(neg.is_err());
        assert!(WalkSpec::from_weights(&[(1, 0, r(3, 2)), (0, 1, r(-1, 2))], false).is_ok());
    }

    #[test]
    fn walk_json_round_trip() {
        let ctx = TowerContext::new();
        let w = WalkSpec::from_json(r#"{"p": {"-1,-1": "3/10", "0,0": "1/5", "1,-1": "1/4", "-1,1": "1/4"}, "strict": true}"#, &ctx)
            .unwrap();
        assert_eq!(w.p(-1, -1), &r(3, 10));
        let again = WalkSpec::from_json(&w.to_json(), &ctx).unwrap();
        assert_eq!(again, w);
        assert!(WalkSpec::from_json(r#"{"p": {"2,0": "1"}}"#, &ctx).is_err());
    }

    #[test]
    fn k17_delta_matches_printed_pattern() {
        let t = r(1, 3);
        let om = order_matrices(&step_set("S17").unwrap().k_t(&t).unwrap());
        let t2 = &t * &t;
        let z = ExactNumber::zero();
        let expected = [
            [z.clone(), t2.clone(), z.clone(), z.clone()],
            [z.clone(), z.clone(), t2.clone(), z.clone()],
            [t2.clone(), t.clone(), z.clone(), t2.clone()],
            [z.clone(), t2.clone(), z.clone(), z.clone()],
        ];
        assert_eq!(om.delta, expected);
        assert!(om.det_delta.is_zero());
    }

    #[test]
    fn k22_determinants() {
        let t = r(2, 7);
        let om = order_matrices(&step_set("S22").unwrap().k_t(&t).unwrap());
        assert_eq!(om.det, -(&t * &t));
        assert_eq!(om.det_delta, t.pow(6));
    }

    #[test]
    fn c4_formula_matches_taylor_series() {
        let q = Biquadratic::from_ints([[1, -2, 3], [2, 5, -1], [-3, 1, 2]]).unwrap();
        let om = order_matrices(&q);
        let model = CubicModel::new(&q, 6).unwrap();
        assert_eq!(&om.c2(), model.coeff(2).unwrap());
        assert_eq!(&om.c3(), model.coeff(3).unwrap());
        assert_eq!(&om.c4(), model.coeff(4).unwrap());
    }

    #[test]
    fn diagnostics_of_simple_and_diagonal_walks() {
        let d = walk_diagnostics(&WalkSpec::simple(), 24, 50).unwrap();
        assert!(d.zero_drift);
        assert_eq!(d.correlation_exact.as_deref(), Some("0"));
        assert!((d.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(d.group_order, Some(4));
        let diag = WalkSpec::from_weights(&[(1, 1, r(1, 2)), (-1, -1, r(1, 2))], true).unwrap();
        assert_eq!(
            walk_diagnostics(&diag, 24, 50)
                .unwrap()
                .correlation_exact
                .as_deref(),
            Some("1")
        );
        let s19 =
            WalkSpec::from_weights(&[(-1, 0, r(1, 3)), (0, -1, r(1, 3)), (1, 1, r(1, 3))], true)
                .unwrap();
        assert!(walk_diagnostics(&s19, 24, 50).unwrap().zero_drift);
    }

    #[test]
    fn bundled_dataset_has_the_attested_sets() {
        let names: Vec<String> = bundled_step_sets().into_iter().map(|s| s.name).collect();
        assert_eq!(
            names,
            ["S1", "S17", "S18", "S19", "S20", "S21", "S22", "S23"]
        );
        let m = order_matrices(&step_set("S17").unwrap().xys().unwrap()).m_q;
        let e = |v| n(v);
        assert_eq!(
            m,
            [[e(0), e(0), e(1)], [e(1), e(0), e(0)], [e(0), e(1), e(0)]]
        );
    }
}
