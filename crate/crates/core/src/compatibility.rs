//! Residuals of the structure equations satisfied by the fundamental data of
//! an H-surface in E(kappa, tau), together with the intrinsic and extrinsic
//! curvatures they involve.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ar::ArField;
use crate::convergence::observed_order;
use crate::grid::ScalarField;
use crate::numerics::compensated_mean;
use crate::patch::DataPatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Equation {
    /// Gauss equation `K = K_e + tau^2 + (kappa - 4 tau^2) nu^2`.
    #[serde(rename = "2.2")]
    Gauss,
    /// `p_zbar = (lambda/2)(kappa - 4 tau^2) nu A` (constant `H`).
    #[serde(rename = "2.3")]
    Codazzi,
    /// `A_zbar = (lambda/2)(H + i tau) nu`.
    #[serde(rename = "2.4")]
    AZbar,
    /// `nu_z = -(H - i tau) A - (2/lambda) p conj(A)`.
    #[serde(rename = "2.5")]
    NuZ,
    /// `|A|^2 = lambda (1 - nu^2) / 4`.
    #[serde(rename = "2.6")]
    UnitXi,
    /// `A_z = (lambda_z / lambda) A + p nu`.
    #[serde(rename = "2.7")]
    AZ,
    /// Gradient identity for `||grad nu||^2`.
    #[serde(rename = "2.8")]
    GradNu,
    /// Jacobi equation `Delta nu = -(4H^2 + 2 tau^2 + b(1 - nu^2) - 2 K_e) nu`.
    #[serde(rename = "2.9")]
    Jacobi,
}

impl Equation {
    pub const LEMMA21: [Equation; 6] =
        [Equation::Gauss, Equation::Codazzi, Equation::AZbar, Equation::NuZ, Equation::UnitXi, Equation::AZ];
    pub const LEMMA22: [Equation; 2] = [Equation::GradNu, Equation::Jacobi];
    pub const ALL: [Equation; 8] = [
        Equation::Gauss,
        Equation::Codazzi,
        Equation::AZbar,
        Equation::NuZ,
        Equation::UnitXi,
        Equation::AZ,
        Equation::GradNu,
        Equation::Jacobi,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Equation::Gauss => "2.2",
            Equation::Codazzi => "2.3",
            Equation::AZbar => "2.4",
            Equation::NuZ => "2.5",
            Equation::UnitXi => "2.6",
            Equation::AZ => "2.7",
            Equation::GradNu => "2.8",
            Equation::Jacobi => "2.9",
        }
    }

    /// Key used for tolerance overrides, e.g. `eq2_5`.
    pub fn key(self) -> String {
        format!("eq{}", self.id().replace('.', "_"))
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.key() == key || e.id() == key)
    }

    /// Power of `1/c` picked up by the residual under `w -> c w`.
    pub fn conformal_weight(self) -> i32 {
        match self {
            Equation::Gauss | Equation::GradNu | Equation::Jacobi => 0,
            Equation::NuZ => 1,
            Equation::AZbar | Equation::UnitXi | Equation::AZ => 2,
            Equation::Codazzi => 3,
        }
    }

    /// No finite differences are involved.
    pub fn is_algebraic(self) -> bool {
        matches!(self, Equation::UnitXi)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationResidual {
    pub equation: Equation,
    pub sup: f64,
    pub mean: f64,
    /// `sup |r| / lambda^(w/2)` with `w` the conformal weight; gauge invariant.
    pub sup_rel: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub h: f64,
    pub entries: Vec<EquationResidual>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_spread: Option<f64>,
}

impl ResidualReport {
    pub fn get(&self, eq: Equation) -> Option<&EquationResidual> {
        self.entries.iter().find(|e| e.equation == eq)
    }

    pub fn sup(&self, eq: Equation) -> f64 {
        self.get(eq).map_or(f64::NAN, |e| e.sup)
    }

    pub fn max_sup(&self) -> f64 {
        self.entries.iter().map(|e| e.sup).fold(0.0, f64::max)
    }

    pub fn max_sup_rel(&self) -> f64 {
        self.entries.iter().map(|e| e.sup_rel).fold(0.0, f64::max)
    }

    /// Concatenate entries of two reports on the same patch.
    pub fn merged(mut self, other: ResidualReport) -> ResidualReport {
        self.entries.extend(other.entries);
        self.h_spread = self.h_spread.or(other.h_spread);
        self
    }

    /// Fill in orders against the next-coarser report.
    pub fn with_orders_from(mut self, coarser: &ResidualReport) -> ResidualReport {
        let ratio = coarser.h / self.h;
        for e in &mut self.entries {
            if e.equation.is_algebraic() {
                continue;
            }
            if let Some(c) = coarser.get(e.equation) {
                e.order = Some(observed_order(c.sup, e.sup, ratio));
            }
        }
        self
    }
}

/// Reports on a refinement sequence (coarsest first) with orders attached.
pub fn attach_orders(reports: Vec<ResidualReport>) -> Vec<ResidualReport> {
    let mut out: Vec<ResidualReport> = Vec::with_capacity(reports.len());
    for r in reports {
        let r = match out.last() {
            Some(prev) => r.with_orders_from(prev),
            None => r,
        };
        out.push(r);
    }
    out
}

fn summarize(d: &DataPatch, eq: Equation, residual: &[f64]) -> EquationResidual {
    let interior: Vec<usize> = d.grid.interior_indices().collect();
    let vals: Vec<f64> = interior.iter().map(|&k| residual[k]).collect();
    let sup = vals.iter().copied().fold(0.0, f64::max);
    let half = 0.5 * eq.conformal_weight() as f64;
    let sup_rel = interior.iter().map(|&k| residual[k] / d.lambda.data[k].powf(half)).fold(0.0, f64::max);
    EquationResidual { equation: eq, sup, mean: compensated_mean(&vals), sup_rel, order: None }
}

/// `K = -(2/lambda) d_z d_zbar ln(lambda) = -Laplacian0(ln lambda) / (2 lambda)`.
pub fn gauss_curvature(d: &DataPatch) -> ScalarField {
    let ln_l = d.lambda.map(f64::ln);
    let lap = d.grid.laplacian0(&ln_l);
    lap.zip_with(&d.lambda, |l, lam| -l / (2.0 * lam))
}

/// `K_e = H^2 - 4|p|^2 / lambda^2`.
pub fn extrinsic_curvature(d: &DataPatch) -> ScalarField {
    let h2 = d.mean_curvature * d.mean_curvature;
    d.p.zip_with(&d.lambda, |p, l| h2 - 4.0 * p.norm_sqr() / (l * l))
}

pub fn verify_lemma21(d: &DataPatch) -> ResidualReport {
    let g = &d.grid;
    let (h, tau, b) = (d.mean_curvature, d.space.tau(), d.space.b());
    let hc = Complex64::new(h, tau);
    let k_int = gauss_curvature(d);
    let k_ext = extrinsic_curvature(d);
    let nu_c = d.nu.map(|v| Complex64::new(v, 0.0));
    let lam_c = d.lambda.map(|v| Complex64::new(v, 0.0));
    let p_zbar = g.dzbar(&d.p);
    let a_zbar = g.dzbar(&d.a);
    let a_z = g.dz(&d.a);
    let nu_z = g.dz(&nu_c);
    let lam_z = g.dz(&lam_c);

    let n = g.len();
    let mut res: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(n)).collect();
    for k in 0..n {
        let (lam, nu, p, a) = (d.lambda.data[k], d.nu.data[k], d.p.data[k], d.a.data[k]);
        res[0].push((k_int.data[k] - k_ext.data[k] - tau * tau - b * nu * nu).abs());
        res[1].push((p_zbar.data[k] - 0.5 * lam * b * nu * a).norm());
        res[2].push((a_zbar.data[k] - 0.5 * lam * hc * nu).norm());
        res[3].push((nu_z.data[k] + hc.conj() * a + (2.0 / lam) * p * a.conj()).norm());
        res[4].push((a.norm_sqr() - 0.25 * lam * (1.0 - nu * nu)).abs());
        res[5].push((a_z.data[k] - lam_z.data[k] / lam * a - p * nu).norm());
    }
    ResidualReport {
        h: g.h,
        entries: Equation::LEMMA21.iter().zip(&res).map(|(eq, r)| summarize(d, *eq, r)).collect(),
        h_spread: d.h_spread,
    }
}

/// Residuals of the gradient identity and the Jacobi equation for `nu`.
///
/// When `b = kappa - 4 tau^2` vanishes (flat reference space) the gradient
/// identity is checked in its multiplied-out form `b ||grad nu||^2 = ...`.
pub fn verify_lemma22(d: &DataPatch, f: &ArField) -> ResidualReport {
    let g = &d.grid;
    let (h, tau, b, kappa) = (d.mean_curvature, d.space.tau(), d.space.b(), d.space.kappa_f());
    let h2 = h * h;
    let k_ext = extrinsic_curvature(d);
    let nu_u = g.du(&d.nu);
    let nu_v = g.dv(&d.nu);
    let lap_nu = g.laplacian0(&d.nu);
    let n = g.len();
    let mut grad_res = Vec::with_capacity(n);
    let mut jac_res = Vec::with_capacity(n);
    for k in 0..n {
        let (lam, nu, ke, q) = (d.lambda.data[k], d.nu.data[k], k_ext.data[k], f.q.data[k]);
        let grad2 = (nu_u.data[k].powi(2) + nu_v.data[k].powi(2)) / lam;
        let g_raw = 4.0 * h2 + kappa - b * nu * nu;
        let bracket = 4.0 * (h2 - ke) + b * (1.0 - nu * nu);
        let r = if b != 0.0 {
            grad2 - (g_raw / (4.0 * b) * bracket - q / b)
        } else {
            b * grad2 - (g_raw / 4.0 * bracket - q)
        };
        grad_res.push(r.abs());
        let rhs = -(4.0 * h2 + 2.0 * tau * tau + b * (1.0 - nu * nu) - 2.0 * ke) * nu;
        jac_res.push((lap_nu.data[k] / lam - rhs).abs());
    }
    ResidualReport {
        h: g.h,
        entries: vec![summarize(d, Equation::GradNu, &grad_res), summarize(d, Equation::Jacobi, &jac_res)],
        h_spread: d.h_spread,
    }
}

/// All eight equations in one report.
pub fn verify_all(d: &DataPatch, f: &ArField) -> ResidualReport {
    verify_lemma21(d).merged(verify_lemma22(d, f))
}

/// Sup-norm of `K - K_e - tau^2 - (kappa - 4 tau^2) nu^2` over interior nodes.
pub fn gauss_equation_defect(d: &DataPatch) -> f64 {
    verify_lemma21(d).sup(Equation::Gauss)
}
