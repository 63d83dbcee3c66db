use cmclab_core::convergence::observed_order;
use cmclab_core::space::{
    base_curvature_fd, check_killing_identity, metric_at, vertical_field_at, ChartPoint, Geometry, SpaceParams,
    TangentVector,
};
use cmclab_core::{make_space, CmcError};
use proptest::prelude::*;

#[test]
fn geometry_tags() {
    let cases = [
        (-1, 0.0, Geometry::H2xR, -1.0),
        (1, 0.0, Geometry::S2xR, 1.0),
        (0, 0.5, Geometry::Heisenberg, -1.0),
        (-1, 0.5, Geometry::PslCover, -2.0),
        (1, 0.25, Geometry::Berger, 0.75),
    ];
    for (k, tau, g, b) in cases {
        let sp = make_space(k, tau).unwrap();
        assert_eq!(sp.geometry(), g);
        assert_eq!(sp.b(), b);
    }
    assert!(matches!(make_space(0, 0.0), Err(CmcError::Degenerate { .. })));
    assert!(matches!(make_space(3, 0.0), Err(CmcError::InvalidKappa(3))));
}

#[test]
fn flat_metric_is_identity() {
    let e = SpaceParams::euclidean();
    for p in [ChartPoint::new(0.0, 0.0, 0.0), ChartPoint::new(3.0, -7.0, 2.0)] {
        let g = metric_at(&e, &p).unwrap();
        assert_eq!(g.0, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(vertical_field_at(&e, &p).unwrap(), TangentVector::new(0.0, 0.0, 1.0));
    }
    let h2 = make_space(-1, 0.0).unwrap();
    let g = metric_at(&h2, &ChartPoint::new(0.0, 0.0, 0.0)).unwrap();
    assert_eq!(g.0, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
}

#[test]
fn heisenberg_metric_couples_fiber() {
    let nil = make_space(0, 0.5).unwrap();
    let g = metric_at(&nil, &ChartPoint::new(1.0, 0.0, 0.0)).unwrap();
    assert!(g.0[1][2].abs() > 0.1);
    assert!((g.determinant() - 1.0).abs() < 1e-12);
}

#[test]
fn chart_domain() {
    let s2 = make_space(1, 0.0).unwrap();
    assert!(matches!(metric_at(&s2, &ChartPoint::new(2.0, 0.1, 0.0)), Err(CmcError::OutOfChart { .. })));
    let h2 = make_space(-1, 0.0).unwrap();
    assert!(metric_at(&h2, &ChartPoint::new(1.0, 1.0, 0.0)).is_ok());
    assert!(vertical_field_at(&h2, &ChartPoint::new(1.5, 1.5, 0.0)).is_err());
}

#[test]
fn killing_identity_values() {
    let e = SpaceParams::euclidean();
    let x = TangentVector::new(1.0, 0.0, 0.0);
    assert!(check_killing_identity(&e, &ChartPoint::new(0.3, 0.2, 1.0), &x, 1e-3).unwrap() < 1e-12);
    let nil = make_space(0, 0.5).unwrap();
    assert!(check_killing_identity(&nil, &ChartPoint::new(0.0, 0.0, 0.0), &x, 1e-3).unwrap() <= 1e-5);
}

#[test]
fn killing_identity_converges_quadratically() {
    let sp = make_space(-1, 0.5).unwrap();
    let p = ChartPoint::new(0.2, -0.1, 0.0);
    let x = TangentVector::new(0.6, 0.0, 0.8);
    let hs = [4e-2, 2e-2, 1e-2, 5e-3];
    let r: Vec<f64> = hs.iter().map(|h| check_killing_identity(&sp, &p, &x, *h).unwrap()).collect();
    for w in r.windows(2) {
        assert!((w[0] / w[1] - 4.0).abs() < 0.8, "{r:?}");
        assert!(observed_order(w[0], w[1], 2.0) >= 1.9);
    }
}

#[test]
fn base_curvature_at_origin() {
    for (k, tau) in [(-1, 0.0), (1, 0.0), (0, 0.5), (-1, 0.5), (1, 0.25)] {
        let sp = make_space(k, tau).unwrap();
        let kb = base_curvature_fd(&sp, 0.0, 0.0, 1e-3).unwrap();
        assert!((kb - k as f64).abs() < 1e-5, "kappa {k}: {kb}");
    }
}

fn any_space() -> impl Strategy<Value = SpaceParams> {
    prop_oneof![Just(-1i64), Just(0), Just(1)]
        .prop_flat_map(|k| (Just(k), 0.0..1.0f64))
        .prop_filter_map("degenerate", |(k, tau)| make_space(k, tau).ok())
}

proptest! {
    #[test]
    fn metric_spd_and_xi_unit(sp in any_space(), r in 0.0..1.9f64, th in 0.0..6.3f64, z in -5.0..5.0f64) {
        let p = ChartPoint::new(r * th.cos(), r * th.sin(), z);
        let g = metric_at(&sp, &p).unwrap();
        prop_assert!(g.is_symmetric());
        prop_assert!(g.leading_minors().iter().all(|m| *m > 0.0));
        let xi = vertical_field_at(&sp, &p).unwrap();
        prop_assert!((g.norm(&xi) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn killing_order(sp in any_space(), x in -0.5..0.5f64, y in -0.5..0.5f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        prop_assume!(a.abs() + b.abs() > 0.2 && sp.tau() > 0.05);
        let p = ChartPoint::new(x, y, 0.0);
        let v = TangentVector::new(a, b, 0.3);
        let r: Vec<f64> = [2e-2, 1e-2, 5e-3].iter().map(|h| check_killing_identity(&sp, &p, &v, *h).unwrap()).collect();
        // below the rounding floor the order is meaningless
        prop_assume!(r[2] > 1e-11);
        prop_assert!(observed_order(r[0], r[1], 2.0) >= 1.9, "{:?}", r);
        prop_assert!(observed_order(r[1], r[2], 2.0) >= 1.9, "{:?}", r);
    }
}
