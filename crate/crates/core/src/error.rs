use thiserror::Error;

/// Errors raised by generators, extractors and classification helpers.
///
/// Verification routines never return errors for "bad" surfaces; large
/// residuals are reported as values instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmcError {
    #[error("degenerate space: kappa - 4 tau^2 = 0 (kappa = {kappa}, tau = {tau})")]
    Degenerate { kappa: i32, tau: f64 },
    #[error("kappa must be -1, 0 or 1, got {0}")]
    InvalidKappa(i64),
    #[error("point ({x}, {y}, {z}) lies outside the chart domain")]
    OutOfChart { x: f64, y: f64, z: f64 },
    #[error("patch is not isothermal at node ({i}, {j}): {detail}")]
    NotIsothermal { i: usize, j: usize, detail: String },
    #[error("degenerate immersion at node ({i}, {j})")]
    DegenerateImmersion { i: usize, j: usize },
    #[error("metric completion E - F^2/G is not positive at s = {s}")]
    DegenerateMetric { s: f64 },
    #[error("curve left the chart domain at arclength {s}")]
    ChartExit { s: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("g_normalized vanishes at s = {s}, inside the protected window |s| < 0.5")]
    GVanishes { s: f64 },
    #[error("profile shooting failed: {0}")]
    ShootingFailure(String),
    #[error("no S-family surface: 4H^2 + kappa = {value} is not negative")]
    NoSFamily { value: f64 },
    #[error("q is below the floor on too many nodes ({unmasked} of {interior} interior nodes usable)")]
    AllMasked { unmasked: usize, interior: usize },
    #[error("a = 4(H^2 + tau^2) vanishes")]
    DegenerateA,
    #[error("b = kappa - 4 tau^2 vanishes")]
    DegenerateB,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, CmcError>;
