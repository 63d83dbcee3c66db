//! Sampled check of the zero-set dichotomy for solutions of
//! `Delta v + g v = 0` with `||grad v||^2 <= h v^2`: such a `v` either never
//! vanishes or vanishes identically.
//!
//! On a patch "identically" means "at every node of the patch"; the
//! continuous statement needs a complete surface and is not checked.

use serde::{Deserialize, Serialize};

use crate::compatibility::extrinsic_curvature;
use crate::grid::{Grid, ScalarField};
use crate::patch::DataPatch;

/// Relative size of `|v|` below which a node counts as a zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-7;
/// Relative tolerance for both hypotheses.
pub const DEFAULT_HYPOTHESIS_TOL: f64 = 1e-5;

/// A conformal metric `lambda |dw|^2` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMetric {
    pub grid: Grid,
    pub lambda: ScalarField,
}

impl ConformalMetric {
    pub fn flat(grid: Grid) -> Self {
        ConformalMetric { lambda: ScalarField::constant(&grid, 1.0), grid }
    }

    pub fn of(d: &DataPatch) -> Self {
        ConformalMetric { grid: d.grid, lambda: d.lambda.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    NeverVanishes,
    VanishesIdentically,
    /// Hypotheses hold but `v` has both zero and nonzero nodes.
    Violated,
    /// A hypothesis fails on the samples.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomyResult {
    pub hypothesis_ok: bool,
    /// `sup |Delta v + g v|` over interior nodes.
    pub equation_residual: f64,
    /// `sup max(||grad v||^2 - h v^2, 0)` over interior nodes.
    pub gradient_excess: f64,
    pub zero_nodes: usize,
    pub nonzero_nodes: usize,
    pub conclusion: Conclusion,
}

/// Check the hypotheses with relative tolerance `hyp_tol` and classify the
/// zero set of `v`. A node is a zero when `|v| <= zero_tol (sup |v| + tiny)`.
pub fn dichotomy_check_with(
    metric: &ConformalMetric,
    v: &ScalarField,
    g: &ScalarField,
    h: &ScalarField,
    zero_tol: f64,
    hyp_tol: f64,
) -> DichotomyResult {
    let grid = &metric.grid;
    let lap = grid.laplacian0(v);
    let vu = grid.du(v);
    let vv = grid.dv(v);
    let (mut eq_res, mut eq_scale, mut excess, mut grad_scale) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in grid.interior_indices() {
        let l = metric.lambda.data[k];
        let delta = lap.data[k] / l;
        let gv = g.data[k] * v.data[k];
        eq_res = eq_res.max((delta + gv).abs());
        eq_scale = eq_scale.max(delta.abs()).max(gv.abs());
        let grad2 = (vu.data[k].powi(2) + vv.data[k].powi(2)) / l;
        let bound = h.data[k] * v.data[k].powi(2);
        excess = excess.max(grad2 - bound);
        grad_scale = grad_scale.max(grad2).max(bound.abs());
    }
    let tiny = f64::MIN_POSITIVE;
    let hypothesis_ok = eq_res <= hyp_tol * (eq_scale + tiny)
        && excess <= hyp_tol * (grad_scale + tiny)
        && h.data.iter().all(|x| *x >= 0.0);
    let sup_v = grid.interior_indices().map(|k| v.data[k].abs()).fold(0.0, f64::max);
    let zero_nodes = grid.interior_indices().filter(|&k| v.data[k].abs() <= zero_tol * (sup_v + tiny)).count();
    let nonzero_nodes = grid.interior_count() - zero_nodes;
    let conclusion = if !hypothesis_ok {
        Conclusion::NotApplicable
    } else if nonzero_nodes == 0 {
        Conclusion::VanishesIdentically
    } else if zero_nodes == 0 {
        Conclusion::NeverVanishes
    } else {
        Conclusion::Violated
    };
    DichotomyResult {
        hypothesis_ok,
        equation_residual: eq_res,
        gradient_excess: excess.max(0.0),
        zero_nodes,
        nonzero_nodes,
        conclusion,
    }
}

pub fn dichotomy_check(
    metric: &ConformalMetric,
    v: &ScalarField,
    g: &ScalarField,
    h: &ScalarField,
    zero_tol: f64,
) -> DichotomyResult {
    dichotomy_check_with(metric, v, g, h, zero_tol, DEFAULT_HYPOTHESIS_TOL)
}

/// Coefficient `4H^2 + 2tau^2 + b(1 - nu^2) - 2K_e` of the Jacobi equation for `nu`.
pub fn jacobi_potential(d: &DataPatch) -> ScalarField {
    let (h, tau, b) = (d.mean_curvature, d.space.tau(), d.space.b());
    extrinsic_curvature(d).zip_with(&d.nu, |ke, nu| 4.0 * h * h + 2.0 * tau * tau + b * (1.0 - nu * nu) - 2.0 * ke)
}

/// `sup ||grad nu||^2 / nu^2` over interior nodes with `nu != 0`.
pub fn measured_gradient_ratio(d: &DataPatch) -> f64 {
    let g = &d.grid;
    let (nu_u, nu_v) = (g.du(&d.nu), g.dv(&d.nu));
    g.interior_indices()
        .filter(|&k| d.nu.data[k] != 0.0)
        .map(|k| (nu_u.data[k].powi(2) + nu_v.data[k].powi(2)) / (d.lambda.data[k] * d.nu.data[k].powi(2)))
        .fold(0.0, f64::max)
}

/// Dichotomy check for `v = nu` with the Jacobi potential and a constant
/// gradient bound `h`.
pub fn jacobi_consistency(d: &DataPatch, h: f64) -> DichotomyResult {
    dichotomy_check(
        &ConformalMetric::of(d),
        &d.nu,
        &jacobi_potential(d),
        &ScalarField::constant(&d.grid, h),
        DEFAULT_ZERO_TOL,
    )
}
