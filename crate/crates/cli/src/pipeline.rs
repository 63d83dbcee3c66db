//! Generate, verify and classify one configured surface.

use anyhow::{bail, Result};
use cmclab_core::ar::{check_dln_q, compute_q, holomorphicity_residual, ArField};
use cmclab_core::canonical::{
    gen_cylinder, gen_rotational_sphere_data, gen_rotational_sphere_immersed, gen_slice, s_family_params,
    synthetic_dlnq_patch, SFamilyParams,
};
use cmclab_core::classify::{classify_patch, classify_s_family, BoundConstants, ClassificationVerdict, Range};
use cmclab_core::compatibility::{attach_orders, verify_all, ResidualReport};
use cmclab_core::convergence::observed_order;
use cmclab_core::patch::{extract_data, to_json_string};
use cmclab_core::{tolerances, DataPatch, SpaceParams};
use serde::Serialize;

use crate::config::{RunConfig, Surface, HOLOMORPHIC_KEY, LN_Q_KEY};

pub const DEFAULT_SLICE_EXTENT: f64 = 0.5;
pub const DEFAULT_SPHERE_EXTENT: f64 = 2.0;
pub const DEFAULT_CYLINDER_LENGTH: f64 = 1.0;
pub const DEFAULT_FIBER_EXTENT: f64 = 0.3;
pub const DEFAULT_SYNTHETIC_SPACING: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct SpaceSummary {
    pub kappa: i32,
    pub tau: f64,
    pub b: f64,
    pub geometry: &'static str,
}

impl SpaceSummary {
    pub fn of(s: &SpaceParams) -> Self {
        SpaceSummary { kappa: s.kappa(), tau: s.tau(), b: s.b(), geometry: s.geometry().label() }
    }
}

/// One refinement level.
#[derive(Debug, Clone, Serialize)]
pub struct Level {
    pub n: usize,
    pub h: f64,
    /// Absent on the synthetic patch, which is not a surface.
    pub residuals: Option<ResidualReport>,
    pub holomorphic: f64,
    pub holomorphic_order: Option<f64>,
    pub ln_q: Option<f64>,
    pub ln_q_order: Option<f64>,
    /// Why `ln_q` was not evaluated.
    pub ln_q_skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QConst {
    pub value: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArSummary {
    pub q_floor: f64,
    pub q: Range,
    pub q_const: Option<QConst>,
    pub masked_nodes: usize,
    pub nodes: usize,
}

impl ArSummary {
    pub fn of(f: &ArField) -> Self {
        let q = Range::of(f.q.data.iter().copied());
        ArSummary {
            q_floor: f.q_floor,
            q,
            q_const: q.is_constant().then(|| QConst { value: q.mean, spread: q.spread() }),
            masked_nodes: f.masked_count(),
            nodes: f.q.data.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: Option<String>,
}

impl Assertion {
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Assertion {
            name: name.into(),
            passed: value <= threshold,
            value: Some(value),
            threshold: Some(threshold),
            detail: None,
        }
    }

    pub fn verdict(expected: &str, actual: Option<&ClassificationVerdict>) -> Self {
        let got = actual.map(|v| v.label.to_string()).unwrap_or_else(|| "none".into());
        Assertion {
            name: "verdict".into(),
            passed: got == expected,
            value: None,
            threshold: None,
            detail: Some(format!("expected {expected}, got {got}")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub surface: String,
    pub space: SpaceSummary,
    #[serde(rename = "H")]
    pub h: f64,
    pub levels: Vec<Level>,
    pub ar: Option<ArSummary>,
    pub verdict: Option<ClassificationVerdict>,
    pub bounds: BoundConstants,
    pub s_family: Option<SFamilyParams>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

/// Everything a run writes.
pub struct Outcome {
    pub report: Report,
    pub fields: Option<String>,
    pub residual_rows: Vec<ResidualRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub equation: String,
    pub n: usize,
    pub h: f64,
    pub sup: f64,
    pub mean: Option<f64>,
    pub sup_rel: Option<f64>,
    pub order: Option<f64>,
}

/// Nodes per side at refinement level `r`; the spacing halves each level.
pub fn level_nodes(n: usize, r: usize) -> usize {
    (n - 1) * (1 << r) + 1
}

/// Mean curvature the generator actually uses.
pub fn effective_h(surface: Surface, h: f64) -> f64 {
    match surface {
        Surface::Slice => 0.0,
        Surface::SyntheticDlnq => 1.0,
        _ => h,
    }
}

fn require_tau_zero(cfg: &RunConfig) -> Result<()> {
    if cfg.space.tau != 0.0 {
        bail!("surface {} needs tau = 0, got {}", cfg.surface.name(), cfg.space.tau);
    }
    Ok(())
}

/// Data patch of the configured surface with `n` nodes per side.
pub fn build_patch(cfg: &RunConfig, space: &SpaceParams, n: usize, level: usize) -> Result<DataPatch> {
    let d = match cfg.surface {
        Surface::Slice => {
            require_tau_zero(cfg)?;
            extract_data(&gen_slice(cfg.space.kappa, cfg.extent.unwrap_or(DEFAULT_SLICE_EXTENT), n)?)?
        }
        Surface::Cylinder => {
            let length = cfg.length.unwrap_or(DEFAULT_CYLINDER_LENGTH);
            gen_cylinder(space, cfg.h, length, cfg.fiber_extent.unwrap_or(DEFAULT_FIBER_EXTENT), n)?.1
        }
        Surface::SphereData => {
            gen_rotational_sphere_data(space, cfg.h, cfg.extent.unwrap_or(DEFAULT_SPHERE_EXTENT), n)?.patch
        }
        Surface::SphereImmersed => {
            require_tau_zero(cfg)?;
            extract_data(&gen_rotational_sphere_immersed(cfg.space.kappa, cfg.h, n)?)?
        }
        Surface::SyntheticDlnq => {
            if (cfg.space.kappa, cfg.space.tau) != (-1, 0.0) {
                bail!("synthetic_dlnq lives in kappa = -1, tau = 0");
            }
            let spacing = cfg.spacing.unwrap_or(DEFAULT_SYNTHETIC_SPACING) / (1u64 << level) as f64;
            synthetic_dlnq_patch(spacing, n)?.0
        }
        Surface::SfamilyParams => bail!("sfamily_params has no patch"),
    };
    Ok(d)
}

/// Label of the configured surface at `(space, H)` on the base grid.
pub fn classify_config(cfg: &RunConfig, space: &SpaceParams) -> Result<ClassificationVerdict> {
    match cfg.surface {
        Surface::SfamilyParams => Ok(classify_s_family(&s_family_params(space, cfg.h)?)),
        Surface::SyntheticDlnq => bail!("synthetic_dlnq is not a surface"),
        _ => {
            let d = build_patch(cfg, space, cfg.n, 0)?;
            Ok(classify_patch(&d, &compute_q(&d)))
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let space = cfg.space.build()?;
    let h = effective_h(cfg.surface, cfg.h);
    let bounds = BoundConstants::new(&space, h);
    let mut assertions = Vec::new();
    let expected = cfg.verdict()?;

    if cfg.surface == Surface::SfamilyParams {
        let s = s_family_params(&space, cfg.h)?;
        let v = classify_s_family(&s);
        if let Some(e) = expected {
            assertions.push(Assertion::verdict(&e.to_string(), Some(&v)));
        }
        return Ok(finish(cfg, &space, h, Vec::new(), None, Some(v), bounds, Some(s), assertions, None));
    }

    let synthetic = cfg.surface == Surface::SyntheticDlnq;
    let mut patches = Vec::with_capacity(cfg.refine);
    for r in 0..cfg.refine {
        let d = build_patch(cfg, &space, level_nodes(cfg.n, r), r)?;
        let f = compute_q(&d);
        patches.push((d, f));
    }
    let residuals = if synthetic {
        vec![None; patches.len()]
    } else {
        attach_orders(patches.iter().map(|(d, f)| verify_all(d, f)).collect()).into_iter().map(Some).collect()
    };
    let mut levels: Vec<Level> = Vec::with_capacity(patches.len());
    for ((d, f), res) in patches.iter().zip(residuals) {
        let hol = holomorphicity_residual(f, d);
        let (ln_q, ln_q_skipped) = match check_dln_q(f, d) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let prev = levels.last();
        let ratio = prev.map(|p| p.h / d.grid.h).unwrap_or(f64::NAN);
        let order = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => Some(observed_order(a, b, ratio)),
            _ => None,
        };
        levels.push(Level {
            n: d.grid.nu,
            h: d.grid.h,
            residuals: res,
            holomorphic: hol,
            holomorphic_order: order(prev.map(|p| p.holomorphic), Some(hol)),
            ln_q,
            ln_q_order: order(prev.and_then(|p| p.ln_q), ln_q),
            ln_q_skipped,
        });
    }

    let (finest, f) = patches.last().expect("refine >= 1");
    let last = levels.last().expect("refine >= 1");
    if let Some(res) = &last.residuals {
        for e in &res.entries {
            let key = e.equation.key();
            assertions.push(Assertion::below(&key, e.sup, cfg.tolerance(&key, tolerances::default_for(e.equation))));
        }
    }
    assertions.push(Assertion::below(
        HOLOMORPHIC_KEY,
        last.holomorphic,
        cfg.tolerance(HOLOMORPHIC_KEY, tolerances::HOLOMORPHIC),
    ));
    let verdict = (!synthetic).then(|| classify_patch(finest, f));
    if synthetic {
        let tol = cfg.tolerance(LN_Q_KEY, tolerances::LN_Q);
        match last.ln_q {
            Some(v) => assertions.push(Assertion::below(LN_Q_KEY, v, tol)),
            None => assertions.push(Assertion {
                name: LN_Q_KEY.into(),
                passed: false,
                value: None,
                threshold: Some(tol),
                detail: last.ln_q_skipped.clone(),
            }),
        }
    }
    if let Some(e) = expected {
        assertions.push(Assertion::verdict(&e.to_string(), verdict.as_ref()));
    }
    let ar = ArSummary::of(f);
    let fields = to_json_string(finest, Some(f));
    Ok(finish(cfg, &space, h, levels, Some(ar), verdict, bounds, None, assertions, Some(fields)))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    cfg: &RunConfig,
    space: &SpaceParams,
    h: f64,
    levels: Vec<Level>,
    ar: Option<ArSummary>,
    verdict: Option<ClassificationVerdict>,
    bounds: BoundConstants,
    s_family: Option<SFamilyParams>,
    assertions: Vec<Assertion>,
    fields: Option<String>,
) -> Outcome {
    let residual_rows = residual_rows(&levels);
    let passed = assertions.iter().all(|a| a.passed);
    let report = Report {
        surface: cfg.surface.name(),
        space: SpaceSummary::of(space),
        h,
        levels,
        ar,
        verdict,
        bounds,
        s_family,
        assertions,
        passed,
    };
    Outcome { report, fields, residual_rows }
}

fn finite(x: Option<f64>) -> Option<f64> {
    x.filter(|v| v.is_finite())
}

pub fn residual_rows(levels: &[Level]) -> Vec<ResidualRow> {
    let mut rows = Vec::new();
    for l in levels {
        if let Some(res) = &l.residuals {
            for e in &res.entries {
                rows.push(ResidualRow {
                    equation: e.equation.key(),
                    n: l.n,
                    h: l.h,
                    sup: e.sup,
                    mean: Some(e.mean),
                    sup_rel: Some(e.sup_rel),
                    order: finite(e.order),
                });
            }
        }
        let extra = |name: &str, sup, order| ResidualRow {
            equation: name.into(),
            n: l.n,
            h: l.h,
            sup,
            mean: None,
            sup_rel: None,
            order: finite(order),
        };
        rows.push(extra(HOLOMORPHIC_KEY, l.holomorphic, l.holomorphic_order));
        if let Some(v) = l.ln_q {
            rows.push(extra(LN_Q_KEY, v, l.ln_q_order));
        }
    }
    rows
}

/// Residual report, holomorphicity and verdict of a saved patch.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub space: SpaceSummary,
    #[serde(rename = "H")]
    pub h: f64,
    pub n: usize,
    pub residuals: ResidualReport,
    pub holomorphic: f64,
    pub ln_q: Option<f64>,
    pub ar: ArSummary,
    pub verdict: ClassificationVerdict,
    pub bounds: BoundConstants,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

/// Recompute everything from the fundamental data; a stored `q` must agree.
pub fn verify_patch(d: &DataPatch, stored_q: Option<&[f64]>, cfg_tol: &dyn Fn(&str, f64) -> f64) -> VerifyReport {
    let f = compute_q(d);
    let residuals = verify_all(d, &f);
    let holomorphic = holomorphicity_residual(&f, d);
    let mut assertions: Vec<Assertion> = residuals
        .entries
        .iter()
        .map(|e| {
            let key = e.equation.key();
            Assertion::below(&key, e.sup, cfg_tol(&key, tolerances::default_for(e.equation)))
        })
        .collect();
    assertions.push(Assertion::below(HOLOMORPHIC_KEY, holomorphic, cfg_tol(HOLOMORPHIC_KEY, tolerances::HOLOMORPHIC)));
    if let Some(q) = stored_q {
        let scale = f.q_max().max(1.0);
        let dev = if q.len() == f.q.data.len() {
            q.iter().zip(&f.q.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
        } else {
            f64::INFINITY
        };
        assertions.push(Assertion::below("stored_q", dev, 1e-12));
    }
    let passed = assertions.iter().all(|a| a.passed);
    VerifyReport {
        space: SpaceSummary::of(&d.space),
        h: d.mean_curvature,
        n: d.grid.nu,
        holomorphic,
        ln_q: check_dln_q(&f, d).ok(),
        ar: ArSummary::of(&f),
        verdict: classify_patch(d, &f),
        bounds: BoundConstants::new(&d.space, d.mean_curvature),
        residuals,
        assertions,
        passed,
    }
}
