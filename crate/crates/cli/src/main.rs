//! `cmclab`: run, sweep and re-verify CMC surface experiments.
//!
//! Exit codes: 0 when every assertion passes, 1 on usage, configuration or
//! IO errors, 2 when an assertion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod pipeline;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cmclab_core::patch::DataPatchJson;

use config::{expand_tol_flags, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "cmclab", version, about = "Constant mean curvature surfaces in E(kappa, tau)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a surface, verify it on refined grids and classify it.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Evaluate hypothesis flags, bounds and verdicts over the configured triples.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Re-verify a saved fields.json.
    Verify {
        fields: PathBuf,
        /// Write verify.json here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "assert-verdict")]
        assert_verdict: Option<String>,
        /// Tolerance override `key=value`; also accepted as `--tol.key=value`.
        #[arg(long = "tol")]
        tol: Vec<String>,
    },
}

#[derive(Args, Debug, Default)]
struct OverrideArgs {
    /// `kappa,tau`
    #[arg(long, allow_hyphen_values = true)]
    space: Option<String>,
    #[arg(long)]
    surface: Option<String>,
    #[arg(long = "H", allow_hyphen_values = true)]
    h: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "assert-verdict")]
    assert_verdict: Option<String>,
    /// Tolerance override `key=value`; also accepted as `--tol.key=value`.
    #[arg(long = "tol")]
    tol: Vec<String>,
}

impl OverrideArgs {
    fn into_overrides(self) -> Overrides {
        Overrides {
            space: self.space,
            surface: self.surface,
            h: self.h,
            n: self.n,
            refine: self.refine,
            out: self.out,
            assert_verdict: self.assert_verdict,
            tol: self.tol,
        }
    }
}

fn load(path: &Path, overrides: OverrideArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply(&overrides.into_overrides())?;
    cfg.validate()?;
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn residuals_csv(rows: &[pipeline::ResidualRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["equation", "n", "h", "sup", "mean", "sup_rel", "order"])?;
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn print_assertions(list: &[pipeline::Assertion]) {
    for a in list.iter().filter(|a| !a.passed) {
        let detail = a.detail.clone().unwrap_or_else(|| format!("{:?} > {:?}", a.value, a.threshold));
        eprintln!("assertion failed: {} ({detail})", a.name);
    }
}

fn cmd_run(cfg: &RunConfig) -> Result<bool> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let outcome = pipeline::run(cfg)?;
    write(&dir, "report.json", &pretty(&outcome.report)?)?;
    if let Some(fields) = &outcome.fields {
        write(&dir, "fields.json", fields)?;
    }
    write(&dir, "residuals.csv", &residuals_csv(&outcome.residual_rows)?)?;
    if !cfg.sweep.is_empty() {
        write(&dir, "sweep.csv", &sweep::to_csv(&sweep::sweep(cfg))?)?;
    }
    let r = &outcome.report;
    let label = r.verdict.as_ref().map(|v| v.label.to_string()).unwrap_or_else(|| "none".into());
    println!("{} in {} (H = {}): verdict {label}, report in {}", r.surface, r.space.geometry, r.h, dir.display());
    print_assertions(&r.assertions);
    Ok(r.passed)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<bool> {
    if cfg.sweep.is_empty() {
        bail!("config has no sweep triples");
    }
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let rows = sweep::sweep(cfg);
    write(&dir, "sweep.csv", &sweep::to_csv(&rows)?)?;
    println!("{} rows in {}", rows.len(), dir.join("sweep.csv").display());
    let Some(expected) = cfg.verdict()? else { return Ok(true) };
    let mut passed = true;
    for r in rows.iter().filter(|r| r.verdict != Some(expected)) {
        eprintln!("assertion failed: ({}, {}, {}) gave {:?}, expected {expected}", r.kappa, r.tau, r.h, r.verdict);
        passed = false;
    }
    Ok(passed)
}

fn cmd_verify(fields: &Path, out: Option<&Path>, assert_verdict: Option<&str>, tol: &[String]) -> Result<bool> {
    let text = fs::read_to_string(fields).with_context(|| format!("reading {}", fields.display()))?;
    let json: DataPatchJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", fields.display()))?;
    let d = json.to_patch().with_context(|| format!("rebuilding the patch in {}", fields.display()))?;
    let mut overrides = std::collections::BTreeMap::new();
    for t in tol {
        let (k, v) = t.split_once('=').with_context(|| format!("tolerance {t:?} is not key=value"))?;
        let v: f64 = v.parse().with_context(|| format!("tolerance value {v:?}"))?;
        if !(v > 0.0) {
            bail!("tolerance {k} must be positive");
        }
        overrides.insert(k.to_string(), v);
    }
    let expected = match assert_verdict {
        Some(s) => {
            Some(cmclab_core::classify::VerdictLabel::parse(s).with_context(|| format!("unknown verdict {s:?}"))?)
        }
        None => None,
    };
    let lookup = |k: &str, default: f64| overrides.get(k).copied().unwrap_or(default);
    let mut report = pipeline::verify_patch(&d, json.q.as_deref(), &lookup);
    if let Some(e) = expected {
        report.assertions.push(pipeline::Assertion::verdict(&e.to_string(), Some(&report.verdict)));
        report.passed = report.assertions.iter().all(|a| a.passed);
    }
    let text = pretty(&report)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            write(dir, "verify.json", &text)?;
            println!("verdict {}, report in {}", report.verdict.label, dir.display());
        }
        None => print!("{text}"),
    }
    print_assertions(&report.assertions);
    Ok(report.passed)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, overrides } => cmd_run(&load(&config, overrides)?),
        Command::Sweep { config, overrides } => cmd_sweep(&load(&config, overrides)?),
        Command::Verify { fields, out, assert_verdict, tol } => {
            cmd_verify(&fields, out.as_deref(), assert_verdict.as_deref(), &tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(expand_tol_flags(std::env::args())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
