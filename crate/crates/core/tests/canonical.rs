use std::f64::consts::PI;

use cmclab_core::ar::compute_q;
use cmclab_core::canonical::{
    g_normalized, g_raw, gen_curve_constant_kg, gen_cylinder, gen_rotational_sphere_data,
    gen_rotational_sphere_data_range, gen_rotational_sphere_immersed, gen_slice, lambda_in_nu_gauge, s_family_params,
    s_family_params_exact, sphere_lambda_of_nu,
};
use cmclab_core::compatibility::{gauss_curvature, verify_lemma21};
use cmclab_core::patch::extract_data;
use cmclab_core::{make_space, CmcError, SpaceParams};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn euclidean_circle_closes() {
    let c = gen_curve_constant_kg(0, 1.0, 2.0 * PI, 1e-3).unwrap();
    assert!(c.closure_gap() < 1e-6);
    assert!(c.measured_speed().iter().flatten().all(|s| (s - 1.0).abs() < 1e-8));
}

#[test]
fn horocycle_is_open_with_unit_curvature() {
    let c = gen_curve_constant_kg(-1, 1.0, 3.0, 1e-3).unwrap();
    let kg: Vec<f64> = c.measured_kg().into_iter().flatten().collect();
    assert!(kg.len() > 100);
    assert!(kg.iter().all(|k| (k - 1.0).abs() < 1e-6));
    assert!(c.closure_gap() > 0.1);
}

#[test]
fn spherical_circle_closes() {
    let rho = (0.5f64).atan();
    let c = gen_curve_constant_kg(1, 2.0, 2.0 * PI * rho.sin(), 1e-3).unwrap();
    assert!(c.closure_gap() < 1e-5, "{}", c.closure_gap());
}

#[test]
fn large_spherical_curve_leaves_chart() {
    assert!(matches!(gen_curve_constant_kg(1, 0.0, 10.0, 1e-2), Err(CmcError::ChartExit { .. })));
}

#[test]
fn curve_csv_header() {
    let c = gen_curve_constant_kg(0, 1.0, 0.1, 1e-2).unwrap();
    let csv = c.to_csv();
    assert!(csv.starts_with("s,x,y,theta,k_g\n"));
    assert_eq!(csv.lines().count(), c.len() + 1);
}

#[test]
fn slices() {
    assert!(matches!(gen_slice(0, 0.5, 21), Err(CmcError::InvalidKappa(0))));
    let d = extract_data(&gen_slice(1, 0.5, 201).unwrap()).unwrap();
    let k = gauss_curvature(&d);
    for i in d.grid.interior_indices() {
        assert!((k.data[i] - 1.0).abs() < 1e-5);
    }
    let d = extract_data(&gen_slice(-1, 0.05, 101).unwrap()).unwrap();
    assert!(compute_q(&d).q_max() <= 1e-12);
    assert!(verify_lemma21(&d).max_sup() <= 1e-6, "{:?}", verify_lemma21(&d));
}

#[test]
fn cylinder_examples() {
    let (_, d) = gen_cylinder(&SpaceParams::euclidean(), 0.5, 1.0, 0.3, 41).unwrap();
    assert!(compute_q(&d).q.data.iter().all(|q| (q - 0.25).abs() < 1e-8));
    let (_, d) = gen_cylinder(&make_space(-1, 0.0).unwrap(), 0.5, 1.0, 0.3, 41).unwrap();
    assert!(compute_q(&d).q.data.iter().all(|q| *q < 1e-8));
    let (im, d) = gen_cylinder(&make_space(0, 0.5).unwrap(), 0.0, 1.0, 0.3, 41).unwrap();
    assert!(gauss_curvature(&d).interior_sup_abs(&d.grid) <= 1e-5);
    let e = extract_data(&im).unwrap();
    assert!(gauss_curvature(&e).interior_sup_abs(&e.grid) <= 1e-5);
    assert!(gen_cylinder(&make_space(0, 0.5).unwrap(), 0.0, 1.0, 0.3, 7).is_err());
}

#[test]
fn sphere_data_anchor_values() {
    let h2 = make_space(-1, 0.0).unwrap();
    assert_eq!(g_normalized(&h2, 1.0, 0.0), 0.75);
    assert_eq!(g_raw(&h2, 1.0, 0.0), 3.0);
    let d = gen_rotational_sphere_data(&h2, 1.0, 2.0, 401).unwrap().patch;
    assert_eq!(d.nu.at(200, 0), 0.0);
    assert!((d.lambda.at(200, 0) - 16.0 / 9.0).abs() < 1e-12);
    assert!((sphere_lambda_of_nu(&h2, 1.0, 0.0) - 16.0 / 9.0).abs() < 1e-12);
    assert!(compute_q(&d).q_max() <= 1e-10);
    assert!(matches!(gen_rotational_sphere_data(&h2, 0.5, 2.0, 401), Err(CmcError::HypothesisViolated(_))));
}

#[test]
fn sphere_data_never_truncates() {
    // g_raw >= 4H^2 + 4tau^2 on [-1, 1] once 4H^2 + kappa > 0
    for (k, tau, h) in [(1, 0.0, 0.05), (1, 0.45, 0.01), (-1, 0.5, 0.51)] {
        let s = gen_rotational_sphere_data(&make_space(k, tau).unwrap(), h, 2.0, 201).unwrap();
        assert!(!s.truncated);
        assert_eq!((s.s_min, s.s_max), (-2.0, 2.0));
    }
    let sp = make_space(1, 0.0).unwrap();
    let s = gen_rotational_sphere_data_range(&sp, 0.5, -1.0, 1.5, 201).unwrap();
    assert_eq!(s.patch.grid.nu, 201);
    assert!((s.patch.grid.u0 + 1.0).abs() < 1e-15);
}

#[test]
fn immersed_spheres() {
    // a round sphere of radius 1/H
    for h in [1.0, 0.5] {
        let d = extract_data(&gen_rotational_sphere_immersed(0, h, 801).unwrap()).unwrap();
        let k = gauss_curvature(&d);
        for i in d.grid.interior_indices() {
            assert!((k.data[i] - h * h).abs() < 1e-4, "{}", k.data[i]);
        }
    }
    let d = extract_data(&gen_rotational_sphere_immersed(-1, 1.0, 1201).unwrap()).unwrap();
    assert!(d.h_spread.unwrap() <= 1e-5);
    assert!(compute_q(&d).q_max() <= 1e-5);
    let h2 = make_space(-1, 0.0).unwrap();
    for (nu, l) in lambda_in_nu_gauge(&d) {
        assert!((l - sphere_lambda_of_nu(&h2, 1.0, nu)).abs() < 1e-4);
    }
    assert!(matches!(gen_rotational_sphere_immersed(-1, 0.5, 401), Err(CmcError::HypothesisViolated(_))));
    assert!(gen_rotational_sphere_immersed(0, 0.0, 401).is_err());
}

#[test]
fn s_family_examples() {
    let h2 = make_space(-1, 0.0).unwrap();
    let s = s_family_params(&h2, 0.4).unwrap();
    assert!((s.nu2 - 0.36).abs() < 1e-12);
    assert!((s.k + 0.36).abs() < 1e-12);
    assert_eq!(s.ke, 0.0);
    assert!(matches!(s_family_params(&h2, 0.5), Err(CmcError::NoSFamily { .. })));
    let s = s_family_params(&make_space(-1, 0.5).unwrap(), 0.25).unwrap();
    assert!((s.nu2 - 0.375).abs() < 1e-12);
    assert!((s.ke + 0.25).abs() < 1e-12);

    let e = s_family_params_exact(-1, &ratio(1, 2), &ratio(1, 4)).unwrap();
    assert_eq!(e.nu2, ratio(3, 8));
    assert!(e.angle_residual.is_zero());
    assert_eq!(e.k, ratio(-3, 4));
    assert!(s_family_params_exact(0, &ratio(1, 2), &ratio(0, 1)).is_err());
}
