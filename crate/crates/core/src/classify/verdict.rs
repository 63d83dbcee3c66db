use serde::{Deserialize, Serialize};

use super::bounds::hypothesis_thm41;
use crate::ar::ArField;
use crate::canonical::SFamilyParams;
use crate::compatibility::{extrinsic_curvature, gauss_curvature, verify_lemma21};
use crate::grid::ScalarField;
use crate::patch::DataPatch;
use crate::space::SpaceParams;

/// Absolute spread below which a field counts as constant.
pub const CONSTANT_ABS_TOL: f64 = 1e-8;
/// Relative spread (against `|mean|`) below which a field counts as constant.
pub const CONSTANT_REL_TOL: f64 = 1e-6;
/// Sup-norm below which `nu`, `H` or `q` count as zero.
pub const ZERO_TOL: f64 = 1e-8;
/// Tolerance for `K_e = -tau^2` and the constant-angle relation.
pub const ALGEBRAIC_MATCH_TOL: f64 = 1e-6;
/// Largest structure-equation residual for which a patch is classified at all.
pub const STRUCTURE_GATE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictLabel {
    RotationalSphere,
    VerticalCylinder,
    Slice,
    SFamily,
    Inconclusive,
}

impl VerdictLabel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "RotationalSphere" => Some(Self::RotationalSphere),
            "VerticalCylinder" => Some(Self::VerticalCylinder),
            "Slice" => Some(Self::Slice),
            "SFamily" => Some(Self::SFamily),
            "Inconclusive" => Some(Self::Inconclusive),
            _ => None,
        }
    }
}

impl std::fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Range summary of a field over the nodes a verdict looks at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Range {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let vals: Vec<f64> = values.into_iter().collect();
        let (min, max) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        Range { min, max, mean: crate::numerics::compensated_mean(&vals) }
    }

    pub fn point(v: f64) -> Self {
        Range { min: v, max: v, mean: v }
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }

    /// Spread at most `max(CONSTANT_ABS_TOL, CONSTANT_REL_TOL |mean|)`.
    pub fn is_constant(&self) -> bool {
        self.spread() <= CONSTANT_ABS_TOL.max(CONSTANT_REL_TOL * self.mean.abs())
    }

    pub fn sup_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

fn interior_range(f: &ScalarField, d: &DataPatch) -> Range {
    Range::of(d.grid.interior_indices().map(|k| f.data[k]))
}

/// Everything the ordered rules read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchInvariants {
    pub space: SpaceParams,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    #[serde(rename = "K")]
    pub k: Range,
    #[serde(rename = "Ke")]
    pub ke: Range,
    pub q: Range,
    pub nu: Range,
    pub nu2: Range,
    /// Largest structure-equation residual, when measured.
    pub structure_residual: Option<f64>,
}

impl PatchInvariants {
    pub fn of_patch(d: &DataPatch, f: &ArField) -> Self {
        let nu2 = d.nu.map(|v| v * v);
        PatchInvariants {
            space: d.space,
            mean_curvature: d.mean_curvature,
            k: interior_range(&gauss_curvature(d), d),
            ke: interior_range(&extrinsic_curvature(d), d),
            q: interior_range(&f.q, d),
            nu: interior_range(&d.nu, d),
            nu2: interior_range(&nu2, d),
            structure_residual: Some(verify_lemma21(d).max_sup_rel()),
        }
    }

    /// Constant-angle parameters as constant fields; `q` follows from the
    /// gradient identity with `grad nu = 0`.
    pub fn of_s_family(s: &SFamilyParams) -> Self {
        let (h, b) = (s.mean_curvature, s.space.b());
        let g_raw = 4.0 * h * h + s.space.kappa_f() - b * s.nu2;
        let q = g_raw / 4.0 * (4.0 * (h * h - s.ke) + b * (1.0 - s.nu2));
        PatchInvariants {
            space: s.space,
            mean_curvature: h,
            k: Range::point(s.k),
            ke: Range::point(s.ke),
            q: Range::point(q),
            nu: Range::point(-s.nu2.sqrt()),
            nu2: Range::point(s.nu2),
            structure_residual: None,
        }
    }
}

/// Predicate values behind a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub four_h2_plus_kappa: f64,
    pub k_positive: bool,
    pub k_nonpositive: bool,
    pub k_nonnegative: bool,
    pub q_zero: bool,
    pub q_constant: bool,
    pub nu_zero: bool,
    pub nu_constant: bool,
    pub nu2_one: bool,
    pub ke_minus_tau2: bool,
    /// `4H^2 + 4tau^2 + b(1 - nu^2)` at the mean of `nu^2`.
    pub angle_residual: f64,
    pub thm41_strict: bool,
    pub thm41_relaxed: bool,
    pub structure_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub label: VerdictLabel,
    pub hypotheses: Hypotheses,
    pub invariants: PatchInvariants,
    pub notes: Vec<String>,
}

/// Apply the ordered rules:
/// `nu = 0` gives a vertical cylinder; `nu^2 = 1, H = 0, tau = 0` a slice;
/// `q = 0, 4H^2 + kappa > 0` a rotational sphere; constant
/// `nu^2 in (0, 1)` with `K_e = -tau^2` and the constant-angle relation the
/// constant-angle family; anything else is inconclusive.
pub fn classify_invariants(inv: &PatchInvariants) -> ClassificationVerdict {
    let (tau, b) = (inv.space.tau(), inv.space.b());
    let h = inv.mean_curvature;
    let lead = 4.0 * h * h + inv.space.kappa_f();
    let (strict, relaxed) = hypothesis_thm41(&inv.space, h);
    let hyp = Hypotheses {
        four_h2_plus_kappa: lead,
        k_positive: inv.k.min > 0.0,
        k_nonpositive: inv.k.max <= ZERO_TOL,
        k_nonnegative: inv.k.min >= -ZERO_TOL,
        q_zero: inv.q.sup_abs() <= ZERO_TOL,
        q_constant: inv.q.is_constant(),
        nu_zero: inv.nu.sup_abs() <= ZERO_TOL,
        nu_constant: inv.nu.is_constant(),
        nu2_one: (inv.nu2.min - 1.0).abs() <= ZERO_TOL && (inv.nu2.max - 1.0).abs() <= ZERO_TOL,
        ke_minus_tau2: inv.ke.is_constant() && (inv.ke.mean + tau * tau).abs() <= ALGEBRAIC_MATCH_TOL,
        angle_residual: 4.0 * h * h + 4.0 * tau * tau + b * (1.0 - inv.nu2.mean),
        thm41_strict: strict,
        thm41_relaxed: relaxed,
        structure_ok: inv.structure_residual.is_none_or(|r| r <= STRUCTURE_GATE),
    };
    let mut notes = vec!["completeness of the surface is assumed, not checked on a patch".to_string()];
    let label = if !hyp.structure_ok {
        notes.push(format!(
            "structure-equation residual {} exceeds {STRUCTURE_GATE}",
            inv.structure_residual.unwrap_or(f64::NAN)
        ));
        VerdictLabel::Inconclusive
    } else if hyp.nu_zero {
        VerdictLabel::VerticalCylinder
    } else if hyp.nu2_one && h.abs() <= ZERO_TOL && tau == 0.0 {
        VerdictLabel::Slice
    } else if hyp.q_zero && lead > 0.0 {
        // K > 0 is recorded but does not gate: at an umbilic pole K = H^2 + kappa - 3 tau^2
        if !hyp.k_positive {
            notes.push(format!("K is not positive on the patch (min {:.3e})", inv.k.min));
        }
        VerdictLabel::RotationalSphere
    } else if hyp.nu_constant
        && inv.nu2.mean > 0.0
        && inv.nu2.mean < 1.0
        && hyp.ke_minus_tau2
        && hyp.angle_residual.abs() <= ALGEBRAIC_MATCH_TOL
    {
        VerdictLabel::SFamily
    } else {
        notes.push("no rule matched".to_string());
        VerdictLabel::Inconclusive
    };
    ClassificationVerdict { label, hypotheses: hyp, invariants: *inv, notes }
}

pub fn classify_patch(d: &DataPatch, f: &ArField) -> ClassificationVerdict {
    classify_invariants(&PatchInvariants::of_patch(d, f))
}

pub fn classify_s_family(s: &SFamilyParams) -> ClassificationVerdict {
    classify_invariants(&PatchInvariants::of_s_family(s))
}
