//! One CSV row per `(kappa, tau, H)` triple: hypothesis flags, bounds, verdict.

use cmclab_core::classify::{BoundConstants, VerdictLabel};
use cmclab_core::par::map_slice;
use cmclab_core::SpaceParams;
use serde::Serialize;

use crate::config::{RunConfig, SpaceSpec, SweepPoint};
use crate::pipeline::{classify_config, effective_h};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub kappa: i64,
    pub tau: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub geometry: String,
    pub four_h2_plus_kappa: f64,
    pub hypothesis_strict: Option<bool>,
    pub hypothesis_relaxed: Option<bool>,
    pub h2_kappa_3tau2: Option<f64>,
    pub c_lower: Option<f64>,
    pub q_upper: Option<f64>,
    pub q_lower_bpos: Option<f64>,
    pub verdict: Option<VerdictLabel>,
    pub note: String,
}

fn row(cfg: &RunConfig, p: &SweepPoint) -> SweepRow {
    let mut row = SweepRow {
        kappa: p.kappa,
        tau: p.tau,
        h: p.h,
        geometry: String::new(),
        four_h2_plus_kappa: 4.0 * p.h * p.h + p.kappa as f64,
        hypothesis_strict: None,
        hypothesis_relaxed: None,
        h2_kappa_3tau2: None,
        c_lower: None,
        q_upper: None,
        q_lower_bpos: None,
        verdict: None,
        note: String::new(),
    };
    let space = match SpaceParams::from_pair(p.kappa, p.tau) {
        Ok(s) => s,
        Err(e) => {
            row.note = e.to_string();
            return row;
        }
    };
    let b = BoundConstants::new(&space, effective_h(cfg.surface, p.h));
    row.geometry = space.geometry().label().to_string();
    row.hypothesis_strict = Some(b.hypothesis_strict);
    row.hypothesis_relaxed = Some(b.hypothesis_relaxed);
    row.h2_kappa_3tau2 = Some(b.h2_kappa_3tau2);
    row.c_lower = b.c_lower;
    row.q_upper = Some(b.q_upper);
    row.q_lower_bpos = b.q_lower_bpos;
    let mut at = cfg.clone();
    at.space = SpaceSpec { kappa: p.kappa, tau: p.tau };
    at.h = p.h;
    match classify_config(&at, &space) {
        Ok(v) => {
            row.verdict = Some(v.label);
            row.note = v.notes.join("; ");
        }
        Err(e) => row.note = e.to_string(),
    }
    row
}

/// Rows in the order of `cfg.sweep`, evaluated in parallel when enabled.
pub fn sweep(cfg: &RunConfig) -> Vec<SweepRow> {
    map_slice(&cfg.sweep, |p| row(cfg, p))
}

pub fn to_csv(rows: &[SweepRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
