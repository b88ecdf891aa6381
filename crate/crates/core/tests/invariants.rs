//! Property tests for the algebraic and geometric invariants of each module.

use proptest::prelude::*;
use qrt_core::biquad::{
    horizontal_switch, orbit_closes, vertical_switch, CurvePoint, Transform, P1,
};
use qrt_core::cubic::{group_law_order, CubicModel};
use qrt_core::linkage::{
    chart_consistency, closed_form_checks, closed_form_period, periodicity, poristic_check,
};
use qrt_core::numbers::{parse_number, to_float, BigFloat};
use qrt_core::poly::{
    multiplicity_pattern, quartic_discriminant, shift_invariance_check, MultiplicityPattern, Poly,
};
use qrt_core::singular::{classify, double_point_period, Case};
use qrt_core::walks::{
    closed_form_group_order, coupled_processor_kernel, kernel, order_matrices, step_set,
};
use qrt_core::{
    analyze_order, link_correspondence, qrt_order, Biquadratic, Configuration, ExactNumber,
    FourBarLink, TowerContext, WalkSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn r(a: i64, b: i64) -> ExactNumber {
    ExactNumber::from_ratio(a, b)
}

fn rat() -> impl Strategy<Value = ExactNumber> {
    (-9i64..=9, 1i64..=9).prop_map(|(a, b)| r(a, b))
}

fn nonzero_rat() -> impl Strategy<Value = ExactNumber> {
    (1i64..=9, 1i64..=9, any::<bool>()).prop_map(|(a, b, neg)| r(if neg { -a } else { a }, b))
}

fn matrix() -> impl Strategy<Value = [[ExactNumber; 3]; 3]> {
    prop::array::uniform3(prop::array::uniform3(rat()))
}

fn curve() -> impl Strategy<Value = Biquadratic> {
    matrix().prop_filter_map("zero polynomial", |a| Biquadratic::new(a).ok())
}

fn smooth(q: &Biquadratic) -> bool {
    q.curve_invariants().map(|i| i.is_smooth()).unwrap_or(false)
}

/// Node at the origin: `a00 = a10 = a01 = 0`.
fn node_curve(a20: i64, a11: i64, a02: i64, rest: [i64; 3]) -> Option<Biquadratic> {
    let mut a = [[0i64; 3]; 3];
    a[2][0] = a20;
    a[1][1] = a11;
    a[0][2] = a02;
    a[2][1] = rest[0];
    a[1][2] = rest[1];
    a[2][2] = rest[2];
    Biquadratic::from_ints(a).ok()
}

/// Curve of a family with a known finite order, drawn from `sel` and `t`.
fn family_curve(sel: usize, t: i64, lam: [i64; 4]) -> Option<Biquadratic> {
    let t = r(t, 40);
    let q = match sel % 4 {
        0 => coupled_processor_kernel(&r(lam[0], 1), &r(lam[1], 1), &r(lam[2], 2), &r(lam[3], 3))
            .ok()?,
        1 => step_set(["S17", "S18", "S19", "S20", "S21"][sel % 5])
            .unwrap()
            .k_t(&t)
            .ok()?,
        2 => step_set(["S22", "S23"][sel % 2]).unwrap().k_t(&t).ok()?,
        _ => step_set("S1").unwrap().k_t(&t).ok()?,
    };
    smooth(&q).then_some(q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tower_field_axioms(c in prop::array::uniform12(-6i64..=6)) {
        let ctx = TowerContext::new();
        let s2 = ctx.sqrt(&r(2, 1)).unwrap();
        let s3 = ctx.sqrt(&r(3, 1)).unwrap();
        let s6 = &s2 * &s3;
        let el = |k: usize| {
            &(&(&r(c[k], 1) + &(&r(c[k + 1], 1) * &s2)) + &(&r(c[k + 2], 2) * &s3)) + &(&r(c[k + 3], 3) * &s6)
        };
        let (x, y, z) = (el(0), el(4), el(8));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        if !x.is_zero() {
            prop_assert!((&x * &(&r(1, 1) / &x)).is_one());
        }
    }

    #[test]
    fn parsed_value_matches_float_evaluation(a in -50i64..=50, b in 1i64..=30, c in -20i64..=20, d in 1i64..=99, e in 1i64..=30) {
        let ctx = TowerContext::new();
        let op = if c < 0 { '-' } else { '+' };
        let x = parse_number(&format!("{a}/{b} {op} {}*sqrt({d}/{e})", c.abs()), &ctx).unwrap();
        let digits = 50;
        let f = |n: i64| BigFloat::from_i64(n, digits);
        let direct = f(a).div(&f(b)).add(&f(c).mul(&f(d).div(&f(e)).sqrt()));
        let diff = to_float(&x, digits).sub(&direct).abs().to_f64();
        prop_assert!(diff < 1e-48, "difference {diff:e}");
    }

    #[test]
    fn nonzero_surds_have_a_sign(a in -400i64..=400, b in -300i64..=300, s in prop::sample::select(vec![2i64, 3, 5, 7, 11])) {
        let ctx = TowerContext::new();
        let x = &r(a, 1) + &(&r(b, 1) * &ctx.sqrt(&r(s, 1)).unwrap());
        prop_assert_eq!(x.is_zero(), a == 0 && b == 0);
        let approx = a as f64 + b as f64 * (s as f64).sqrt();
        if approx.abs() > 1e-6 {
            prop_assert_eq!(x.is_negative(), approx < 0.0);
        }
        // Squaring out the radical certifies the sign of nonzero values.
        if !x.is_zero() {
            let conj = &r(a, 1) - &(&r(b, 1) * &ctx.sqrt(&r(s, 1)).unwrap());
            prop_assert!(!(&x * &conj).is_zero() || a * a == b * b * s);
        }
    }

    #[test]
    fn discriminant_vanishes_iff_repeated_root(roots in prop::collection::vec(-3i64..=3, 3..=4), lc in 1i64..=5, quad in any::<bool>()) {
        let mut p = Poly::from_ints(&[lc]);
        let finite: Vec<i64> = if quad { roots[..2].to_vec() } else { roots.clone() };
        for r0 in &finite {
            p = p.mul(&Poly::from_ints(&[-r0, 1]));
        }
        if quad {
            p = p.mul(&Poly::from_ints(&[1, 0, 1]));
        }
        let p = p.nominal(4);
        let disc_zero = quartic_discriminant(&p).is_zero();
        prop_assert_eq!(disc_zero, multiplicity_pattern(&p) != MultiplicityPattern::Simple);
        let mut counts = std::collections::BTreeMap::new();
        for r0 in &finite {
            *counts.entry(*r0).or_insert(0usize) += 1;
        }
        let expected: usize = counts.values().map(|k| k - 1).sum();
        prop_assert_eq!(p.gcd(&p.derivative()).degree(), Some(expected));
    }

    #[test]
    fn eisenstein_shift_reversal_scaling(c in prop::array::uniform5(rat()), alpha in rat(), beta in nonzero_rat()) {
        let p = Poly::new(c.to_vec()).nominal(4);
        prop_assert!(shift_invariance_check(&p, &alpha, &beta).pass);
    }

    #[test]
    fn switches_are_exact_involutions(a in matrix(), x0 in rat(), y0 in rat()) {
        let mut a = a;
        let Ok(q0) = Biquadratic::new(a.clone()) else { return Ok(()) };
        a[0][0] = &a[0][0] - &q0.eval(&x0, &y0);
        let Ok(q) = Biquadratic::new(a) else { return Ok(()) };
        let p = CurvePoint::new(x0, y0);
        if let Ok(h) = horizontal_switch(&q, &p) {
            prop_assert_eq!(horizontal_switch(&q, &h).unwrap(), p.clone());
        }
        if let Ok(v) = vertical_switch(&q, &p) {
            prop_assert_eq!(vertical_switch(&q, &v).unwrap(), p);
        }
    }

    #[test]
    fn invariants_are_covariant_under_transforms(q in curve(), t in rat(), s in nonzero_rat(), k in 0usize..7) {
        let op = [
            Transform::TranslateX(t.clone()),
            Transform::TranslateY(t),
            Transform::ScaleX(s.clone()),
            Transform::ScaleY(s),
            Transform::InvertX,
            Transform::InvertY,
            Transform::SwapXY,
        ][k].clone();
        let (a, b) = (q.curve_invariants().unwrap(), q.transform(&op).curve_invariants().unwrap());
        prop_assert_eq!(a.f.is_zero(), b.f.is_zero());
        if !a.f.is_zero() {
            prop_assert!((&b.f / &a.f).sqrt_exact().is_some(), "F ratio is not a square");
        }
        prop_assert_eq!(a.j, b.j);
    }

    #[test]
    fn smooth_iff_both_patterns_simple(q in curve()) {
        let (p1, p2) = q.critical_patterns();
        let simple = p1 == MultiplicityPattern::Simple && p2 == MultiplicityPattern::Simple;
        prop_assert_eq!(simple, smooth(&q));
    }

    #[test]
    fn constructed_nodes_are_singular(a20 in 1i64..=5, a11 in -5i64..=5, a02 in 1i64..=5, rest in prop::array::uniform3(-5i64..=5)) {
        let Some(q) = node_curve(a20, a11, a02, rest) else { return Ok(()) };
        let (p1, p2) = q.critical_patterns();
        prop_assert!(!smooth(&q));
        prop_assert!(p1 != MultiplicityPattern::Simple || p2 != MultiplicityPattern::Simple);
    }

    #[test]
    fn flipping_y_negates_the_series_and_keeps_verdicts(q in curve()) {
        prop_assume!(smooth(&q) && !q.det().is_zero());
        let m = CubicModel::new(&q, 8).unwrap();
        let flipped = CubicModel::from_parts(m.g2.clone(), -m.g3.clone(), m.x.clone(), -m.y.clone(), 8);
        for k in 0..=8 {
            prop_assert_eq!(flipped.coeff(k).unwrap(), &-m.coeff(k).unwrap().clone());
        }
        for n in 2..=8 {
            prop_assert_eq!(flipped.cayley_condition(n).unwrap(), m.cayley_condition(n).unwrap());
        }
    }

    #[test]
    fn classification_survives_chart_changes(q in curve(), t in rat(), s in nonzero_rat(), node in any::<bool>(), nc in (1i64..=4, -4i64..=4, 1i64..=4, prop::array::uniform3(-3i64..=3))) {
        let q = if node { node_curve(nc.0, nc.1, nc.2, nc.3).unwrap_or(q) } else { q };
        let case = classify(&q).unwrap().case;
        for op in [Transform::TranslateX(t.clone()), Transform::TranslateY(t.clone()), Transform::ScaleX(s.clone()), Transform::ScaleY(s.clone())] {
            prop_assert_eq!(classify(&q.transform(&op)).unwrap().case, case);
        }
    }

    #[test]
    fn random_nodes_classify_as_case_one(a20 in 1i64..=6, a11 in -6i64..=6, a02 in 1i64..=6, rest in prop::array::uniform3(1i64..=6)) {
        prop_assume!(a11 * a11 != 4 * a20 * a02);
        let q = node_curve(a20, a11, a02, rest).unwrap();
        let c = classify(&q).unwrap();
        // A node whose branches are lines through the origin is a different case.
        prop_assume!(c.components.len() == 1);
        prop_assert_eq!(c.case, Case::I);
    }

    #[test]
    fn niven_gate_on_random_ratios(p in -2000i64..=2000, q in 1i64..=1000) {
        let qn = if p == 0 { node_curve(1, 0, 1, [1, 1, 1]) } else { node_curve(q, 2 * p, p, [1, 1, 1]) }.unwrap();
        let rep = double_point_period(&qn, 24).unwrap();
        let ratio = r(p, q);
        let table = [(r(0, 1), 2), (r(1, 4), 3), (r(1, 2), 4), (r(3, 4), 6)];
        let expected = table.iter().find(|(v, _)| *v == ratio).map(|(_, n)| *n);
        prop_assert_eq!(rep.period, expected);
    }

    #[test]
    fn determinant_taylor_identities(w in prop::array::uniform9(0i64..=12)) {
        let mut weights = Vec::new();
        for (i, v) in w.iter().enumerate() {
            weights.push(((i / 3) as i8 - 1, (i % 3) as i8 - 1, r(*v, 12)));
        }
        let q = kernel(&WalkSpec::from_weights(&weights, false).unwrap()).unwrap();
        prop_assume!(smooth(&q) && !q.det().is_zero());
        let m = CubicModel::new(&q, 5).unwrap();
        let om = order_matrices(&q);
        prop_assert_eq!(m.coeff(2).unwrap() * &q.det().pow(3), &r(2, 1) * &om.det_delta);
        prop_assert_eq!(m.coeff(3).unwrap() * &q.det().pow(5), &r(-2, 1) * &om.det_omega);
        prop_assert_eq!(&om.c4(), m.coeff(4).unwrap());
        if !om.det_delta.is_zero() {
            let c2 = m.coeff(2).unwrap();
            let c3 = m.coeff(3).unwrap();
            prop_assert_eq!(om.order10_lhs(), &(c3 * c3) / c2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_orders_match_hankel(w in prop::array::uniform9(0i64..=12), sel in 0usize..20, t in 1i64..=13, lam in prop::array::uniform4(1i64..=9)) {
        let q = if sel % 2 == 0 {
            // Force det(a) = 0 by solving for a00, which enters the determinant linearly.
            let mut weights = Vec::new();
            for (i, v) in w.iter().enumerate() {
                weights.push(((i / 3) as i8 - 1, (i % 3) as i8 - 1, r(*v, 12)));
            }
            let q = kernel(&WalkSpec::from_weights(&weights, false).unwrap()).unwrap();
            let mut a = q.matrix().clone();
            let cof = &(&a[1][1] * &a[2][2]) - &(&a[1][2] * &a[2][1]);
            prop_assume!(!cof.is_zero());
            a[0][0] = &a[0][0] - &(&q.det() / &cof);
            let Ok(q) = Biquadratic::new(a) else { return Ok(()) };
            q
        } else {
            let Some(q) = family_curve(sel / 2, t, lam) else { return Ok(()) };
            q
        };
        prop_assume!(smooth(&q));
        let order = qrt_order(&q, 12, false).unwrap().group_order;
        for k in [4, 6, 8] {
            prop_assert_eq!(closed_form_group_order(&q, k).unwrap().holds, order == Some(k), "k = {}", k);
        }
    }

    #[test]
    fn qrt_order_matches_float_orbits(sel in 0usize..20, t in 1i64..=13, lam in prop::array::uniform4(1i64..=9), x0 in -30i32..=30) {
        let Some(q) = family_curve(sel, t, lam) else { return Ok(()) };
        let n = qrt_order(&q, 24, false).unwrap().qrt_order();
        // Orbits pass near poles of the chart, so compare at 50 digits with ε = 10^-25.
        let digits = 50;
        let qf = q.to_float(digits);
        let x = BigFloat::from_i64(x0 as i64 * 1000 + 91, digits).div(&BigFloat::from_i64(7000, digits));
        let (a, b, c) = qf.y_fiber(&P1::Finite(x.clone()));
        let disc = b.mul(&b).sub(&BigFloat::from_i64(4, digits).mul(&a).mul(&c));
        prop_assume!(disc.to_f64() > 1e-12 && a.to_f64().abs() > 1e-9);
        let y = b.neg().add(&disc.sqrt()).div(&BigFloat::from_i64(2, digits).mul(&a));
        let start = CurvePoint::new(x, y);
        let horizon = n.map_or(24, |n| 3 * n as usize);
        let Ok(closes) = orbit_closes(&qf, &start, horizon, 1e-25) else { return Ok(()) };
        prop_assert_eq!(closes.map(|k| k as u32), n);
    }

    #[test]
    fn node_orbits_close_at_the_period(k in 0usize..5, sign in any::<bool>(), rest in prop::array::uniform3(1i64..=5), seeds in prop::array::uniform5(-40i32..=40)) {
        // (a20, |a11|, a02) with a11²/(4 a20 a02) = 0, 1/4, 1/2, 3/4, 1/3.
        let (a20, a11, a02, period) = [(1, 0, 1, Some(2)), (1, 1, 1, Some(3)), (2, 2, 1, Some(4)), (3, 3, 1, Some(6)), (3, 2, 1, None)][k];
        let q = node_curve(a20, if sign { a11 } else { -a11 }, a02, rest).unwrap();
        // Some draws split into two conics; those take the Möbius route.
        prop_assume!(classify(&q).unwrap().case == Case::I);
        let verdict = analyze_order(&q, 24, false).unwrap().verdict.qrt_order();
        prop_assert_eq!(verdict, period);
        let qf = q.to_f64();
        let horizon = period.map_or(72, |n| 3 * n as usize);
        for s in seeds {
            let x = s as f64 / 9.0 + 0.031;
            let (a, b, c) = qf.y_fiber(&P1::Finite(x));
            let disc = b * b - 4.0 * a * c;
            if disc <= 0.0 || a.abs() < 1e-9 {
                continue;
            }
            let start = CurvePoint::new(x, (-b + disc.sqrt()) / (2.0 * a));
            if let Ok(closes) = orbit_closes(&qf, &start, horizon, 1e-9) {
                prop_assert_eq!(closes.map(|k| k as u32), period);
            }
        }
    }
}

fn side_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        (1i64..=20, 1i64..=4).prop_map(|(a, b)| format!("{a}/{b}")),
        (1i64..=60, 1i64..=5).prop_map(|(a, b)| format!("sqrt({a}/{b})")),
    ]
}

fn link_strategy() -> impl Strategy<Value = FourBarLink> {
    prop::array::uniform4(side_strategy()).prop_filter_map("not a quadrilateral", |s| {
        FourBarLink::parse(&[&s[0], &s[1], &s[2], &s[3]], &TowerContext::new()).ok()
    })
}

/// Rational link with `ac = bd`.
fn four_periodic_link() -> impl Strategy<Value = FourBarLink> {
    (1i64..=12, 1i64..=12, 1i64..=12, 1i64..=3).prop_filter_map(
        "not a quadrilateral",
        |(a, b, c, den)| {
            let (a, b, c) = (r(a, den), r(b, den), r(c, den));
            let d = &(&a * &c) / &b;
            FourBarLink::new(a, b, c, d).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn link_discriminant_is_the_printed_product(l in link_strategy()) {
        let f = link_correspondence(&l).curve_invariants().unwrap().f;
        prop_assert_eq!(f, &r(256, 1) * &l.f_l());
    }

    #[test]
    fn link_correspondence_is_centrally_symmetric(l in link_strategy(), x in rat(), y in rat()) {
        let q = link_correspondence(&l);
        prop_assert!(q.is_centrally_symmetric());
        prop_assert_eq!(q.eval(&x, &y), q.eval(&-x.clone(), &-y.clone()));
    }

    #[test]
    fn chart_commutes_with_darboux(l in link_strategy(), seed in any::<u64>()) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let cfg = Configuration::random(l.sides_f64(), &mut g).unwrap();
        if let Ok(err) = chart_consistency(&l, &cfg) {
            prop_assert!(err < 1e-9, "chart error {err:e}");
        }
    }

    #[test]
    fn poristic_period_is_start_independent(l in four_periodic_link()) {
        prop_assume!(smooth(&link_correspondence(&l)));
        let check = poristic_check(l.sides_f64(), Some(4), 12, 20).unwrap();
        prop_assert!(check.passed, "{:?}", check);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semi_period_doubles(l in prop_oneof![link_strategy(), four_periodic_link()]) {
        prop_assume!(smooth(&link_correspondence(&l)));
        let rep = periodicity(&l, 12, false).unwrap();
        if let Some(k) = rep.semi_period {
            prop_assert_eq!(rep.period, Some(2 * k));
        }
    }
}

#[test]
fn cayley_condition_iff_order_divides() {
    let mut curves = Vec::new();
    let mut sel = 0usize;
    while curves.len() < 100 {
        sel += 1;
        let t = (sel % 13) as i64 + 1;
        let lam = [
            sel as i64 % 7 + 1,
            sel as i64 % 5 + 2,
            sel as i64 % 3 + 1,
            4,
        ];
        if let Some(q) = family_curve(sel, t, lam) {
            curves.push(q);
        }
    }
    for q in curves {
        let model = CubicModel::new(&q, 24).unwrap();
        let g = group_law_order(&model, 24);
        for n in 2..=24u32 {
            assert_eq!(
                model.cayley_condition(n).unwrap(),
                g.is_some_and(|g| n % g == 0),
                "n = {n}, order {g:?}"
            );
        }
    }
}

#[test]
fn closed_form_link_verdicts_match_hankel() {
    use rand::Rng;
    let mut g = ChaCha8Rng::seed_from_u64(2000);
    let (mut compared, mut periodic) = (0, 0);
    while compared < 2000 {
        let mut s = |lo: i64, hi: i64| r(g.gen_range(lo..=hi), g.gen_range(1..=4));
        let (a, b, c) = (s(1, 16), s(1, 16), s(1, 16));
        let d = match compared % 4 {
            0 => &(&a * &c) / &b,
            1 => {
                let d2 = &(&(&a * &a) + &(&c * &c)) - &(&b * &b);
                if !d2.is_positive() {
                    continue;
                }
                TowerContext::new().sqrt(&d2).unwrap()
            }
            _ => s(1, 16),
        };
        let Ok(l) = FourBarLink::new(a, b, c, d) else {
            continue;
        };
        let q = link_correspondence(&l);
        if !smooth(&q) {
            continue;
        }
        compared += 1;
        let closed = closed_form_period(&closed_form_checks(&l)).map(|(n, _)| n);
        let hankel = qrt_order(&q, 6, false).unwrap().qrt_order();
        assert_eq!(closed, hankel, "{:?}", l.sides_text());
        periodic += usize::from(hankel.is_some());
    }
    assert!(
        periodic >= 500,
        "only {periodic} periodic links in the sweep"
    );
}
