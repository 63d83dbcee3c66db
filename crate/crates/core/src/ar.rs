//! The holomorphic quadratic differential `Q dz^2 = (2(H + i tau) p - (kappa - 4 tau^2) A^2) dz^2`
//! and its gauge-invariant modulus `q = 4|Q|^2 / lambda^2`.

use num_complex::Complex64;

use crate::compatibility::gauss_curvature;
use crate::error::{CmcError, Result};
use crate::grid::{ComplexField, Field, ScalarField};
use crate::patch::DataPatch;

/// Relative floor applied to `max q` when building the zero mask.
pub const Q_FLOOR_RELATIVE: f64 = 1e-9;
/// Absolute floor used when `max q` itself is below [`Q_FLOOR_RELATIVE`].
pub const Q_FLOOR_ABSOLUTE: f64 = 1e-12;
/// Minimum fraction of usable interior nodes for the `ln q` identity.
pub const MIN_UNMASKED_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ArField {
    /// `Q` per node.
    pub q_dz2: ComplexField,
    /// `q = 4|Q|^2 / lambda^2` per node.
    pub q: ScalarField,
    /// `true` where `q` is below the floor.
    pub zero_mask: Field<bool>,
    pub q_floor: f64,
}

impl ArField {
    pub fn all_masked(&self) -> bool {
        self.zero_mask.data.iter().all(|m| *m)
    }

    pub fn masked_count(&self) -> usize {
        self.zero_mask.data.iter().filter(|m| **m).count()
    }

    pub fn q_max(&self) -> f64 {
        self.q.data.iter().copied().fold(0.0, f64::max)
    }
}

pub fn default_floor(q_max: f64) -> f64 {
    if q_max < Q_FLOOR_RELATIVE {
        Q_FLOOR_ABSOLUTE
    } else {
        Q_FLOOR_RELATIVE * q_max
    }
}

pub fn compute_q(d: &DataPatch) -> ArField {
    compute_q_with_floor(d, None)
}

/// Same as [`compute_q`], with an explicit mask floor.
pub fn compute_q_with_floor(d: &DataPatch, floor: Option<f64>) -> ArField {
    let hc = Complex64::new(d.mean_curvature, d.space.tau());
    let b = d.space.b();
    let grid = &d.grid;
    let q_dz2 = grid.map(|i, j| {
        let k = grid.idx(i, j);
        2.0 * hc * d.p.data[k] - b * d.a.data[k] * d.a.data[k]
    });
    let q = q_dz2.zip_with(&d.lambda, |qq, l| 4.0 * qq.norm_sqr() / (l * l));
    let q_max = q.data.iter().copied().fold(0.0, f64::max);
    let q_floor = floor.unwrap_or_else(|| default_floor(q_max));
    let zero_mask = q.map(|v| v < q_floor);
    ArField { q_dz2, q, zero_mask, q_floor }
}

/// `sup |d_zbar Q|` over interior nodes.
pub fn holomorphicity_residual(f: &ArField, d: &DataPatch) -> f64 {
    let dq = d.grid.dzbar(&f.q_dz2);
    d.grid.interior_indices().map(|k| dq.data[k].norm()).fold(0.0, f64::max)
}

/// Residual on a patch and its half-step refinement, with the observed order.
pub fn holomorphicity_order(coarse: (&ArField, &DataPatch), fine: (&ArField, &DataPatch)) -> (f64, f64, f64) {
    let rc = holomorphicity_residual(coarse.0, coarse.1);
    let rf = holomorphicity_residual(fine.0, fine.1);
    let order = crate::convergence::observed_order(rc, rf, coarse.1.grid.h / fine.1.grid.h);
    (rc, rf, order)
}

/// `sup |Delta ln q - 4K|` over interior nodes whose five-point stencil is
/// entirely unmasked. `Delta = (4/lambda) d_z d_zbar`.
pub fn check_dln_q(f: &ArField, d: &DataPatch) -> Result<f64> {
    let grid = &d.grid;
    let usable: Vec<usize> = grid
        .interior_indices()
        .filter(|&k| {
            let (i, j) = grid.ij(k);
            [(i, j), (i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)].iter().all(|&(a, b)| !f.zero_mask.at(a, b))
        })
        .collect();
    let interior = grid.interior_count();
    if usable.is_empty() || (usable.len() as f64) < MIN_UNMASKED_FRACTION * interior as f64 {
        return Err(CmcError::AllMasked { unmasked: usable.len(), interior });
    }
    let ln_q = f.q.zip_with(&f.zero_mask, |q, m| if m { 0.0 } else { q.ln() });
    let lap = grid.laplacian0(&ln_q);
    let k_gauss = gauss_curvature(d);
    Ok(usable.iter().map(|&k| (lap.data[k] / d.lambda.data[k] - 4.0 * k_gauss.data[k]).abs()).fold(0.0, f64::max))
}
