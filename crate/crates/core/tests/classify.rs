use cmclab_core::ar::compute_q;
use cmclab_core::canonical::{gen_cylinder, gen_rotational_sphere_data, gen_slice, s_family_params};
use cmclab_core::classify::{
    c_constant, classify_invariants, classify_patch, classify_s_family, critical_point_ratio, f_of, f_of_expanded,
    gauss_from_eq66, hypothesis_thm41, leading_coefficient_check, q_lower_bound, q_upper_bound, BoundConstants,
    PatchInvariants, RationalPoly, VerdictLabel,
};
use cmclab_core::patch::extract_data;
use cmclab_core::{make_space, CmcError, SpaceParams};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn f_anchor_values() {
    assert!((f_of(0.0, 1.44, -1.0) - 5.6644).abs() < 1e-12);
    assert!((f_of(1.0, 1.44, -1.0) - 2.5344).abs() < 1e-12);
    assert!((f_of(-1.0, 1.44, -1.0) - 2.5344).abs() < 1e-12);
    assert!((f_of(0.5, 1.0, -1.0) - f_of_expanded(0.5, 1.0, -1.0)).abs() < 1e-12);
}

#[test]
fn c_constant_examples() {
    assert!((c_constant(1.44, -1.0).unwrap() - 2.5344).abs() < 1e-12);
    assert!(matches!(c_constant(1.0, -1.0), Err(CmcError::HypothesisViolated(_))));
    assert!((critical_point_ratio(1.44, -1.0) - 4.76 / 3.0).abs() < 1e-12);
}

#[test]
fn hypothesis_examples() {
    let h2 = make_space(-1, 0.0).unwrap();
    let s2 = make_space(1, 0.0).unwrap();
    assert_eq!(hypothesis_thm41(&h2, 1.2), (true, true));
    assert_eq!(hypothesis_thm41(&h2, 1.0), (false, true));
    assert_eq!(hypothesis_thm41(&s2, 0.4), (false, false));
}

#[test]
fn bound_examples() {
    let h2 = make_space(-1, 0.0).unwrap();
    let s2 = make_space(1, 0.0).unwrap();
    assert!((q_lower_bound(&s2, 1.0).unwrap() - 2.25).abs() < 1e-12);
    assert!((q_lower_bound(&h2, 1.2).unwrap() - 2.5344).abs() < 1e-12);
    assert!(matches!(q_lower_bound(&s2, 0.4), Err(CmcError::HypothesisViolated(_))));
    assert!((q_upper_bound(&h2, 1.0) - 16.5).abs() < 1e-12);
    assert!((q_upper_bound(&make_space(0, 0.5).unwrap(), 0.0) - 3.0).abs() < 1e-12);
    assert!((q_upper_bound(&SpaceParams::euclidean(), 0.5) - 0.5).abs() < 1e-12);
    let b = BoundConstants::new(&h2, 1.2);
    assert_eq!(b.a6, 4.0 * b.a4);
    assert!(b.c_lower.is_some() && b.q_lower_bpos.is_none());
}

#[test]
fn cylinder_q_below_upper_bound() {
    for (k, tau, h) in [(0, 0.5, 0.5), (1, 0.0, 1.0), (-1, 0.5, 0.5), (1, 0.25, 0.5)] {
        let sp = make_space(k, tau).unwrap();
        let (_, d) = gen_cylinder(&sp, h, 1.0, 0.3, 21).unwrap();
        assert!(compute_q(&d).q_max() <= q_upper_bound(&sp, h));
    }
}

#[test]
fn curvature_identity() {
    assert_eq!(gauss_from_eq66(4.0, -1.0, 0.0).unwrap(), 15.0 / 16.0);
    assert_eq!(gauss_from_eq66(2.0, -2.0, 0.0).unwrap(), 0.0);
    assert!((gauss_from_eq66(2.0, -2.0, 0.5).unwrap() + 0.140625 * 2.0).abs() < 1e-12);
    assert!(matches!(gauss_from_eq66(0.0, -1.0, 0.0), Err(CmcError::DegenerateA)));
}

#[test]
fn leading_coefficient_examples() {
    let (p1, c1) = leading_coefficient_check(&r(4, 1), &r(-1, 1), &r(1, 1)).unwrap();
    let (_, c0) = leading_coefficient_check(&r(4, 1), &r(-1, 1), &r(0, 1)).unwrap();
    assert_eq!(c1, r(1, 1));
    assert_eq!(c0, c1);
    assert_eq!(p1.degree(), Some(3));
    assert!(matches!(leading_coefficient_check(&r(4, 1), &r(0, 1), &r(1, 1)), Err(CmcError::DegenerateB)));
}

#[test]
fn rational_poly_arithmetic() {
    let x = RationalPoly::x();
    let one = RationalPoly::constant(r(1, 1));
    let p = &(&x + &one) * &(&x - &one);
    assert_eq!(p.coeffs(), &[r(-1, 1), r(0, 1), r(1, 1)]);
    assert_eq!(p.eval(&r(3, 2)), r(5, 4));
    assert!((&p - &p).is_zero());
    assert_eq!((&p - &p).degree(), None);
}

#[test]
fn classifier_examples() {
    let nil = make_space(0, 0.5).unwrap();
    let (_, d) = gen_cylinder(&nil, 0.0, 1.0, 0.3, 41).unwrap();
    assert_eq!(classify_patch(&d, &compute_q(&d)).label, VerdictLabel::VerticalCylinder);
    let h2 = make_space(-1, 0.0).unwrap();
    let d = gen_rotational_sphere_data(&h2, 1.0, 2.0, 401).unwrap().patch;
    let v = classify_patch(&d, &compute_q(&d));
    assert_eq!(v.label, VerdictLabel::RotationalSphere);
    assert!(v.hypotheses.k_positive);
    let d = extract_data(&gen_slice(1, 0.5, 61).unwrap()).unwrap();
    assert_eq!(classify_patch(&d, &compute_q(&d)).label, VerdictLabel::Slice);
    let s = s_family_params(&h2, 0.4).unwrap();
    assert_eq!(classify_s_family(&s).label, VerdictLabel::SFamily);
}

#[test]
fn sphere_with_negative_curvature_is_noted() {
    let d = gen_rotational_sphere_data(&make_space(0, 0.5).unwrap(), 0.5, 2.0, 401).unwrap().patch;
    let v = classify_patch(&d, &compute_q(&d));
    assert_eq!(v.label, VerdictLabel::RotationalSphere);
    assert!(!v.hypotheses.k_positive);
    assert!(v.notes.iter().any(|n| n.contains("not positive")));
}

#[test]
fn classifier_rejects_broken_patches() {
    let h2 = make_space(-1, 0.0).unwrap();
    let mut d = gen_rotational_sphere_data(&h2, 1.0, 2.0, 401).unwrap().patch;
    d.p = d.p.map(|p| 1.5 * p);
    let v = classify_patch(&d, &compute_q(&d));
    assert_eq!(v.label, VerdictLabel::Inconclusive);
    assert!(!v.hypotheses.structure_ok);
}

#[test]
fn classifier_ordering_prefers_cylinder() {
    let h2 = make_space(-1, 0.0).unwrap();
    let (_, d) = gen_cylinder(&h2, 0.5, 1.0, 0.3, 41).unwrap();
    let v = classify_patch(&d, &compute_q(&d));
    assert!(v.hypotheses.q_zero && v.hypotheses.nu_zero);
    assert_eq!(v.label, VerdictLabel::VerticalCylinder);
}

#[test]
fn verdict_labels_parse() {
    for l in [
        VerdictLabel::RotationalSphere,
        VerdictLabel::VerticalCylinder,
        VerdictLabel::Slice,
        VerdictLabel::SFamily,
        VerdictLabel::Inconclusive,
    ] {
        assert_eq!(VerdictLabel::parse(&l.to_string()), Some(l));
    }
    assert_eq!(VerdictLabel::parse("Torus"), None);
}

#[test]
fn s_family_invariants_have_no_structure_residual() {
    let s = s_family_params(&make_space(-1, 0.25).unwrap(), 0.1).unwrap();
    let inv = PatchInvariants::of_s_family(&s);
    assert!(inv.structure_residual.is_none());
    assert_eq!(classify_invariants(&inv).label, VerdictLabel::SFamily);
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-10_000i64..=10_000, 1i64..=10_000).prop_map(|(n, d)| r(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn f_matches_expansion(nu in -1.0..=1.0f64, a4 in 0.0..10.0f64, b in -10.0..10.0f64) {
        let (f, e) = (f_of(nu, a4, b), f_of_expanded(nu, a4, b));
        prop_assert!((f - e).abs() <= 1e-12 * f.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn leading_coefficient_is_b_squared(a6 in rational(), b in rational(), c in rational()) {
        prop_assume!(b != r(0, 1) && a6 != r(0, 1));
        let (p, lead) = leading_coefficient_check(&a6, &b, &c).unwrap();
        prop_assert_eq!(&lead, &(&b * &b));
        prop_assert_eq!(p.coeff(3), lead);
        prop_assert_eq!(p.degree(), Some(3));
    }

    #[test]
    fn sampled_minimum_is_c(tau in 0.0..1.0f64, h in 0.0..3.0f64) {
        let sp = make_space(-1, tau).unwrap();
        prop_assume!(hypothesis_thm41(&sp, h).0);
        let (a4, b) = (h * h + tau * tau, sp.b());
        prop_assert!(critical_point_ratio(a4, b) > 1.0);
        let c = c_constant(a4, b).unwrap();
        let n = 20_001;
        let min = (0..n).map(|k| f_of(-1.0 + 2.0 * k as f64 / (n - 1) as f64, a4, b)).fold(f64::INFINITY, f64::min);
        prop_assert!((min - c).abs() <= 1e-10 * c.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn verdicts_are_gauge_stable(c in 0.25..4.0f64, which in 0usize..3, h in 0.6..1.5f64) {
        let sp = make_space(-1, 0.25).unwrap();
        let d = match which {
            0 => gen_rotational_sphere_data(&sp, h, 2.0, 201).unwrap().patch,
            1 => gen_cylinder(&sp, h, 1.0, 0.3, 41).unwrap().1,
            _ => extract_data(&gen_slice(-1, 0.5, 41).unwrap()).unwrap(),
        };
        let a = classify_patch(&d, &compute_q(&d)).label;
        let scaled = d.rescaled(c);
        let b = classify_patch(&scaled, &compute_q(&scaled)).label;
        prop_assert_eq!(a, b);
        prop_assert_ne!(a, VerdictLabel::Inconclusive);
    }
}
