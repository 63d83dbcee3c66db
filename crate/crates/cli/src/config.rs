//! Run configuration: one JSON file plus command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cmclab_core::classify::VerdictLabel;
use cmclab_core::compatibility::Equation;
use cmclab_core::SpaceParams;
use serde::{Deserialize, Serialize};

/// Tolerance keys other than the per-equation `eqX_Y`.
pub const HOLOMORPHIC_KEY: &str = "holomorphic";
pub const LN_Q_KEY: &str = "ln_q";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub kappa: i64,
    pub tau: f64,
}

impl SpaceSpec {
    pub fn build(&self) -> Result<SpaceParams> {
        SpaceParams::from_pair(self.kappa, self.tau).with_context(|| format!("space ({}, {})", self.kappa, self.tau))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Slice,
    Cylinder,
    SphereData,
    SphereImmersed,
    SfamilyParams,
    SyntheticDlnq,
}

impl Surface {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .with_context(|| format!("unknown surface {s:?}"))
    }

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub kappa: i64,
    pub tau: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceSpec,
    pub surface: Surface,
    #[serde(rename = "H", default)]
    pub h: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_refine")]
    pub refine: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Overrides keyed by `eq2_2` ... `eq2_9`, `holomorphic`, `ln_q`.
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    #[serde(default)]
    pub assert_verdict: Option<String>,
    /// Half-width in `s` for spheres, side length for slices.
    #[serde(default)]
    pub extent: Option<f64>,
    /// Cylinder arclength.
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default)]
    pub fiber_extent: Option<f64>,
    /// Lattice spacing of the synthetic patch.
    #[serde(default)]
    pub spacing: Option<f64>,
    #[serde(default)]
    pub sweep: Vec<SweepPoint>,
}

fn default_n() -> usize {
    201
}

fn default_refine() -> usize {
    2
}

/// Flag overrides, applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub space: Option<String>,
    pub surface: Option<String>,
    pub h: Option<f64>,
    pub n: Option<usize>,
    pub refine: Option<usize>,
    pub out: Option<PathBuf>,
    pub assert_verdict: Option<String>,
    pub tol: Vec<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(s) = &o.space {
            self.space = parse_space(s)?;
        }
        if let Some(s) = &o.surface {
            self.surface = Surface::parse(s)?;
        }
        if let Some(h) = o.h {
            self.h = h;
        }
        if let Some(n) = o.n {
            self.n = n;
        }
        if let Some(r) = o.refine {
            self.refine = r;
        }
        if let Some(p) = &o.out {
            self.out = Some(p.clone());
        }
        if let Some(v) = &o.assert_verdict {
            self.assert_verdict = Some(v.clone());
        }
        for t in &o.tol {
            let (k, v) = t.split_once('=').with_context(|| format!("tolerance {t:?} is not key=value"))?;
            let v: f64 = v.parse().with_context(|| format!("tolerance value {v:?}"))?;
            self.tol.insert(k.to_string(), v);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 5 {
            bail!("n must be at least 5, got {}", self.n);
        }
        if self.refine < 1 {
            bail!("refine must be at least 1");
        }
        if !self.h.is_finite() {
            bail!("H must be finite");
        }
        for (k, v) in &self.tol {
            if Equation::from_key(k).is_none() && k != HOLOMORPHIC_KEY && k != LN_Q_KEY {
                bail!("unknown tolerance key {k:?}");
            }
            if !(*v > 0.0 && v.is_finite()) {
                bail!("tolerance {k} must be positive, got {v}");
            }
        }
        for (name, v) in [
            ("extent", self.extent),
            ("length", self.length),
            ("fiber_extent", self.fiber_extent),
            ("spacing", self.spacing),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    bail!("{name} must be positive, got {v}");
                }
            }
        }
        self.verdict()?;
        self.space.build()?;
        Ok(())
    }

    pub fn verdict(&self) -> Result<Option<VerdictLabel>> {
        match &self.assert_verdict {
            None => Ok(None),
            Some(s) => VerdictLabel::parse(s).map(Some).with_context(|| format!("unknown verdict {s:?}")),
        }
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tol.get(key).copied().unwrap_or(default)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("cmclab-out"))
    }
}

/// `"kappa,tau"`.
pub fn parse_space(s: &str) -> Result<SpaceSpec> {
    let (k, t) = s.split_once(',').with_context(|| format!("space {s:?} is not kappa,tau"))?;
    Ok(SpaceSpec {
        kappa: k.trim().parse().with_context(|| format!("kappa {k:?}"))?,
        tau: t.trim().parse().with_context(|| format!("tau {t:?}"))?,
    })
}

/// Rewrite `--tol.eq2_5=v` and `--tol.eq2_5 v` as `--tol eq2_5=v`.
pub fn expand_tol_flags(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter().peekable();
    while let Some(a) = it.next() {
        match a.strip_prefix("--tol.") {
            Some(rest) => {
                out.push("--tol".to_string());
                if rest.contains('=') {
                    out.push(rest.to_string());
                } else {
                    let v = it.next().unwrap_or_default();
                    out.push(format!("{rest}={v}"));
                }
            }
            None => out.push(a),
        }
    }
    out
}
