//! Generators for the canonical CMC families: slices, vertical cylinders
//! over curves of constant geodesic curvature, rotational spheres (closed-form
//! data and, for product spaces, an immersion from profile shooting), the
//! constant-angle parameter family and a synthetic patch for the `ln q`
//! identity.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CmcError, Result};
use crate::grid::{Field, Grid, ScalarField, MIN_NODES};
use crate::numerics::{hermite, rk4_step};
use crate::patch::{isothermalize_cohomogeneity1, DataPatch, ImmersedPatch, Parametrization, EXTRACTION_TRIM};
use crate::space::{make_space, SpaceParams, DEFAULT_CHART_RADIUS2};

/// Largest integration step used for base curves.
pub const CURVE_MAX_STEP: f64 = 1e-3;

/// Default half-width of the `s` interval for closed-form sphere data.
pub const SPHERE_S_EXTENT: f64 = 2.0;

/// Zeros of `g_normalized` closer than this to `s = 0` are an error rather
/// than a truncation.
pub const SPHERE_PROTECTED_S: f64 = 0.5;

/// Starting distance from the pole for the profile shooter.
pub const PROFILE_START: f64 = 1e-5;

/// Half-width in `u` of the immersed sphere patch, centred at the equator.
pub const SPHERE_U_HALF_EXTENT: f64 = 1.2;

/// Rotation-direction node count of the immersed sphere patch.
pub const SPHERE_NV: usize = 9;

fn check_kappa(kappa: i64) -> Result<i32> {
    if (-1..=1).contains(&kappa) {
        Ok(kappa as i32)
    } else {
        Err(CmcError::InvalidKappa(kappa))
    }
}

fn in_base_chart(kappa: i32, x: f64, y: f64) -> bool {
    let r2 = x * x + y * y;
    match kappa {
        1 => r2 < DEFAULT_CHART_RADIUS2,
        -1 => r2 < 4.0,
        _ => r2.is_finite(),
    }
}

// ---------------------------------------------------------------------------
// Base curves

/// Unit-speed samples of a base curve with constant geodesic curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve2D {
    pub kappa: i32,
    pub k_g: f64,
    pub h_s: f64,
    pub s: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Euclidean angle of the tangent in the chart.
    pub theta: Vec<f64>,
}

impl Curve2D {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    fn mu(&self, k: usize) -> f64 {
        1.0 / (1.0 + self.kappa as f64 * (self.x[k] * self.x[k] + self.y[k] * self.y[k]) / 4.0)
    }

    /// Base-metric speed per sample, from fourth-order differences of the positions.
    pub fn measured_speed(&self) -> Vec<Option<f64>> {
        (0..self.len())
            .map(|k| {
                let (dx, _) = self.derivs(k, &self.x)?;
                let (dy, _) = self.derivs(k, &self.y)?;
                Some(self.mu(k) * dx.hypot(dy))
            })
            .collect()
    }

    /// Geodesic curvature measured from the positions alone,
    /// `(k_E - d_n ln mu) / mu` with `k_E` the chart curvature and `n` the left normal.
    /// The two samples at each end have no centred stencil and report `None`.
    pub fn measured_kg(&self) -> Vec<Option<f64>> {
        let kappa = self.kappa as f64;
        (0..self.len())
            .map(|k| {
                let (x1, x2) = self.derivs(k, &self.x)?;
                let (y1, y2) = self.derivs(k, &self.y)?;
                let speed = x1.hypot(y1);
                let k_e = (x1 * y2 - y1 * x2) / speed.powi(3);
                let (nx, ny) = (-y1 / speed, x1 / speed);
                let mu = self.mu(k);
                // grad ln mu = -(kappa/2) mu (x, y)
                let dn = -0.5 * kappa * mu * (self.x[k] * nx + self.y[k] * ny);
                Some((k_e - dn) / mu)
            })
            .collect()
    }

    fn derivs(&self, k: usize, f: &[f64]) -> Option<(f64, f64)> {
        if k < 2 || k + 2 >= f.len() {
            return None;
        }
        let h = self.h_s;
        let d1 = (-f[k + 2] + 8.0 * f[k + 1] - 8.0 * f[k - 1] + f[k - 2]) / (12.0 * h);
        let d2 = (-f[k + 2] + 16.0 * f[k + 1] - 30.0 * f[k] + 16.0 * f[k - 1] - f[k - 2]) / (12.0 * h * h);
        Some((d1, d2))
    }

    /// Chart distance between the last and first samples.
    pub fn closure_gap(&self) -> f64 {
        let n = self.len() - 1;
        (self.x[n] - self.x[0]).hypot(self.y[n] - self.y[0])
    }

    /// CSV with columns `s,x,y,theta,k_g`; `k_g` is empty where unmeasured.
    pub fn to_csv(&self) -> String {
        let kg = self.measured_kg();
        let mut out = String::from("s,x,y,theta,k_g\n");
        for k in 0..self.len() {
            let kg = kg[k].map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", self.s[k], self.x[k], self.y[k], self.theta[k], kg).expect("string write");
        }
        out
    }

    /// Every `stride`-th sample.
    fn subsample(&self, stride: usize) -> Curve2D {
        let pick = |v: &[f64]| v.iter().step_by(stride).copied().collect::<Vec<_>>();
        Curve2D {
            kappa: self.kappa,
            k_g: self.k_g,
            h_s: self.h_s * stride as f64,
            s: pick(&self.s),
            x: pick(&self.x),
            y: pick(&self.y),
            theta: pick(&self.theta),
        }
    }
}

/// Integrate `x' = cos(theta)/mu, y' = sin(theta)/mu,
/// theta' = k_g + kappa (x sin(theta) - y cos(theta)) / 2` from the origin
/// with `theta(0) = 0`. The step is `length / ceil(length / h_s)`.
pub fn gen_curve_constant_kg(kappa: i64, k_g: f64, length: f64, h_s: f64) -> Result<Curve2D> {
    if !(length > 0.0 && h_s > 0.0) {
        return Err(CmcError::InvalidGrid(format!("curve length {length} and step {h_s} must be positive")));
    }
    let steps = (length / h_s).ceil().max(1.0) as usize;
    integrate_curve(check_kappa(kappa)?, k_g, length / steps as f64, steps)
}

fn integrate_curve(kappa: i32, k_g: f64, h: f64, steps: usize) -> Result<Curve2D> {
    let kf = kappa as f64;
    let rhs = |y: &[f64; 3]| {
        let inv_mu = 1.0 + kf * (y[0] * y[0] + y[1] * y[1]) / 4.0;
        let (s, c) = y[2].sin_cos();
        [c * inv_mu, s * inv_mu, k_g + 0.5 * kf * (y[0] * s - y[1] * c)]
    };
    let mut state = [0.0; 3];
    let mut curve = Curve2D {
        kappa,
        k_g,
        h_s: h,
        s: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        y: Vec::with_capacity(steps + 1),
        theta: Vec::with_capacity(steps + 1),
    };
    for k in 0..=steps {
        if k > 0 {
            state = rk4_step(&rhs, &state, h);
        }
        let s = k as f64 * h;
        if !in_base_chart(kappa, state[0], state[1]) {
            return Err(CmcError::ChartExit { s });
        }
        curve.s.push(s);
        curve.x.push(state[0]);
        curve.y.push(state[1]);
        curve.theta.push(state[2]);
    }
    Ok(curve)
}

// ---------------------------------------------------------------------------
// Slices

/// Horizontal slice `z = 0` over `[-extent, extent]^2` in the product space
/// with base curvature `kappa`, parametrized by the conformal base chart.
pub fn gen_slice(kappa: i64, extent: f64, n: usize) -> Result<ImmersedPatch> {
    if kappa == 0 {
        return Err(CmcError::InvalidKappa(0));
    }
    let space = make_space(kappa, 0.0)?;
    let h = 2.0 * extent / (n.max(2) - 1) as f64;
    let grid = Grid::new(n, n, h, -extent, -extent)?;
    ImmersedPatch::from_fn(space, grid, h, Parametrization::Isothermal, |u, v| crate::space::ChartPoint::new(u, v, 0.0))
}

// ---------------------------------------------------------------------------
// Vertical cylinders

/// Vertical cylinder over the curve of geodesic curvature `2H` through the
/// base origin, on `length` of arclength and `fiber_extent` of fiber height.
///
/// The lattice has `n` nodes along the curve and spacing `h = length/(n-1)`
/// in both directions. Nodes run against the curve's orientation so that
/// `X_u x X_v` is the normal for which the mean curvature is `+H`. The data
/// patch is the closed form `lambda = 1`, `p = (H - i tau)/2`, `A = -i/2`,
/// `nu = 0` on the same lattice.
pub fn gen_cylinder(
    space: &SpaceParams,
    h_mean: f64,
    length: f64,
    fiber_extent: f64,
    n: usize,
) -> Result<(ImmersedPatch, DataPatch)> {
    if n < MIN_NODES + 2 * EXTRACTION_TRIM {
        return Err(CmcError::InvalidGrid(format!(
            "cylinder needs at least {} nodes along the curve, got {n}",
            MIN_NODES + 2 * EXTRACTION_TRIM
        )));
    }
    let h = length / (n - 1) as f64;
    let stride = (h / CURVE_MAX_STEP).ceil().max(1.0) as usize;
    let fine = integrate_curve(space.kappa(), 2.0 * h_mean, h / stride as f64, (n - 1) * stride)?;

    // (alpha(s), t) has E = 1 + F^2, F = omega(alpha'), G = 1.
    let tau = space.tau();
    let f: Vec<f64> =
        (0..fine.len()).map(|k| tau * (fine.y[k] * fine.theta[k].cos() - fine.x[k] * fine.theta[k].sin())).collect();
    let e: Vec<f64> = f.iter().map(|v| 1.0 + v * v).collect();
    let g = vec![1.0; fine.len()];
    let iso = isothermalize_cohomogeneity1(&e, &f, &g, 0.0, fine.h_s)?;
    let curve = fine.subsample(stride);
    let shift: Vec<f64> = iso.t_shift.iter().step_by(stride).copied().collect();

    let nv = ((fiber_extent / h).round() as usize + 1).max(MIN_NODES + 2 * EXTRACTION_TRIM);
    let v0 = -0.5 * (nv - 1) as f64 * h;
    let grid = Grid::new(n, nv, h, 0.0, v0)?;
    let last = n - 1;
    let immersed = ImmersedPatch::from_fn(*space, grid, h, Parametrization::Isothermal, |u, v| {
        let k = last - (u / h).round() as usize;
        crate::space::ChartPoint::new(curve.x[k], curve.y[k], v - shift[k])
    })?;

    let p = Complex64::new(h_mean, -tau) / 2.0;
    let data = DataPatch::new(
        *space,
        h_mean,
        grid,
        Field::constant(&grid, 1.0),
        Field::constant(&grid, p),
        Field::constant(&grid, Complex64::new(0.0, -0.5)),
        Field::constant(&grid, 0.0),
    )?;
    Ok((immersed, data))
}

/// Closed-form `q` on a vertical cylinder, `(4H^2 + kappa)^2 / 4`.
pub fn cylinder_q(space: &SpaceParams, h_mean: f64) -> f64 {
    (4.0 * h_mean * h_mean + space.kappa_f()).powi(2) / 4.0
}

// ---------------------------------------------------------------------------
// Rotational spheres, data level

/// `g_normalized(nu) = (4H^2 + kappa - (kappa - 4 tau^2) nu^2) / (4 sqrt(H^2 + tau^2))`.
pub fn g_normalized(space: &SpaceParams, h_mean: f64, nu: f64) -> f64 {
    g_raw(space, h_mean, nu) / (4.0 * (h_mean * h_mean + space.tau() * space.tau()).sqrt())
}

/// `g_raw(nu) = 4H^2 + kappa - (kappa - 4 tau^2) nu^2`.
pub fn g_raw(space: &SpaceParams, h_mean: f64, nu: f64) -> f64 {
    4.0 * h_mean * h_mean + space.kappa_f() - space.b() * nu * nu
}

/// Conformal factor of the sphere data in the coordinate `s = artanh(nu)`.
pub fn sphere_lambda_of_nu(space: &SpaceParams, h_mean: f64, nu: f64) -> f64 {
    (1.0 - nu * nu) / g_normalized(space, h_mean, nu).powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereData {
    pub patch: DataPatch,
    pub s_min: f64,
    pub s_max: f64,
    /// The requested interval was shortened to avoid a zero of `g_normalized`.
    pub truncated: bool,
}

/// Closed-form fundamental data of the rotational sphere on
/// `w = s + it`, `s in [-s_extent, s_extent]`, with `n` nodes in `s` and
/// five in `t`.
///
/// `nu = tanh s`, `lambda = sech^2 s / g_normalized^2`,
/// `A = -(H + i tau) sech^2 s / (2 sqrt(H^2 + tau^2) g_normalized)` and
/// `p = (kappa - 4 tau^2) A^2 / (2 (H + i tau))`, so `Q` vanishes identically.
pub fn gen_rotational_sphere_data(space: &SpaceParams, h_mean: f64, s_extent: f64, n: usize) -> Result<SphereData> {
    gen_rotational_sphere_data_range(space, h_mean, -s_extent, s_extent, n)
}

pub fn gen_rotational_sphere_data_range(
    space: &SpaceParams,
    h_mean: f64,
    s_min: f64,
    s_max: f64,
    n: usize,
) -> Result<SphereData> {
    let tau = space.tau();
    let lead = 4.0 * h_mean * h_mean + space.kappa_f();
    if !(lead > 0.0) {
        return Err(CmcError::HypothesisViolated(format!("rotational spheres need 4H^2 + kappa > 0, got {lead}")));
    }
    if h_mean == 0.0 && tau == 0.0 {
        return Err(CmcError::HypothesisViolated("rotational spheres need (H, tau) != (0, 0)".into()));
    }
    if !(s_max > s_min) || n < 2 {
        return Err(CmcError::InvalidGrid(format!("empty s interval [{s_min}, {s_max}]")));
    }
    // g_normalized vanishes where nu^2 = (4H^2 + kappa) / b, possible only for b > 0.
    let (mut lo, mut hi, mut truncated) = (s_min, s_max, false);
    let b = space.b();
    if b > 0.0 && lead / b < 1.0 {
        let s_zero = (lead / b).sqrt().atanh();
        if s_zero < SPHERE_PROTECTED_S {
            return Err(CmcError::GVanishes { s: s_zero });
        }
        let margin = 0.05 * s_zero;
        if hi > s_zero - margin {
            hi = s_zero - margin;
            truncated = true;
        }
        if lo < -(s_zero - margin) {
            lo = -(s_zero - margin);
            truncated = true;
        }
    }
    let h = (hi - lo) / (n - 1) as f64;
    let grid = Grid::new(n, MIN_NODES, h, lo, -2.0 * h)?;
    let hc = Complex64::new(h_mean, tau);
    let root = (h_mean * h_mean + tau * tau).sqrt();
    let per_row: Vec<(f64, Complex64, Complex64, f64)> = (0..n)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let nu = s.tanh();
            let sech2 = 1.0 / s.cosh().powi(2);
            let gn = g_normalized(space, h_mean, nu);
            let a = -hc * sech2 / (2.0 * root * gn);
            let p = b * a * a / (2.0 * hc);
            (sech2 / (gn * gn), p, a, nu)
        })
        .collect();
    let lambda = grid.map(|i, _| per_row[i].0);
    let p = grid.map(|i, _| per_row[i].1);
    let a = grid.map(|i, _| per_row[i].2);
    let nu = grid.map(|i, _| per_row[i].3);
    let patch = DataPatch::new(*space, h_mean, grid, lambda, p, a, nu)?;
    Ok(SphereData { patch, s_min: lo, s_max: hi, truncated })
}

/// `(nu, lambda_s)` along the middle column of an extracted rotational
/// patch, where `lambda_s = lambda_u (1 - nu^2)^2 / nu_u^2` is the conformal
/// factor in the coordinate `s = artanh(nu)`. Nodes with `|nu_u|` below
/// `1e-8` are skipped.
pub fn lambda_in_nu_gauge(d: &DataPatch) -> Vec<(f64, f64)> {
    let g = &d.grid;
    let nu_u = g.du(&d.nu);
    let j = g.nv / 2;
    (1..g.nu - 1)
        .filter_map(|i| {
            let (nu, du, l) = (d.nu.at(i, j), nu_u.at(i, j), d.lambda.at(i, j));
            (du.abs() > 1e-8).then(|| (nu, l * (1.0 - nu * nu).powi(2) / (du * du)))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Rotational spheres, immersed (product spaces)

fn sn(kappa: i32, r: f64) -> f64 {
    match kappa {
        1 => r.sin(),
        -1 => r.sinh(),
        _ => r,
    }
}

fn ct(kappa: i32, r: f64) -> f64 {
    match kappa {
        1 => 1.0 / r.tan(),
        -1 => 1.0 / r.tanh(),
        _ => 1.0 / r,
    }
}

/// Profile samples `(l, rho, height, sigma)` of a rotational CMC sphere,
/// uniform in arclength `l` from the end of the pole ramp.
struct Profile {
    dl: f64,
    rho: Vec<f64>,
    height: Vec<f64>,
    sigma: Vec<f64>,
}

fn shoot_profile(kappa: i32, h_mean: f64, dl: f64) -> Result<Profile> {
    let rhs = |y: &[f64; 3]| {
        let (s, c) = y[2].sin_cos();
        [c, s, 2.0 * h_mean - ct(kappa, y[0]) * s]
    };
    let eps = PROFILE_START;
    let mut y = [eps, 0.5 * h_mean * eps * eps, h_mean * eps];
    // ramp away from the singular pole with steps shrinking toward it
    let mut budget = 10_000_000usize;
    while y[0] / 20.0 < dl {
        y = rk4_step(&rhs, &y, y[0] / 20.0);
        budget -= 1;
        if budget == 0 || !(y[0] > 0.0) {
            return Err(CmcError::ShootingFailure("profile did not leave the pole".into()));
        }
    }
    let stop = PI - 0.01;
    let mut prof = Profile { dl, rho: vec![y[0]], height: vec![y[1]], sigma: vec![y[2]] };
    while y[2] < stop {
        y = rk4_step(&rhs, &y, dl);
        budget -= 1;
        if budget == 0 || !(y[0] > 0.0) || !y.iter().all(|v| v.is_finite()) {
            return Err(CmcError::ShootingFailure(format!(
                "sigma reached {} of {stop} before the step budget ran out",
                y[2]
            )));
        }
        prof.rho.push(y[0]);
        prof.height.push(y[1]);
        prof.sigma.push(y[2]);
    }
    Ok(prof)
}

/// Sphere of revolution with constant mean curvature `H` in the product
/// space with base curvature `kappa`, sampled on an isothermal lattice of
/// `n` by [`SPHERE_NV`] nodes centred on the equator.
///
/// The profile `rho' = cos sigma, h' = sin sigma,
/// sigma' = 2H - ct(rho) sin sigma` is shot from the pole, then the
/// isothermal coordinate `u = int dl / sn(rho)` is inverted by cubic
/// Hermite interpolation so that nodes sit at uniform `u`. The `u` axis
/// runs from the upper hemisphere down.
pub fn gen_rotational_sphere_immersed(kappa: i64, h_mean: f64, n: usize) -> Result<ImmersedPatch> {
    let kappa = check_kappa(kappa)?;
    if !(4.0 * h_mean * h_mean + kappa as f64 > 0.0) || h_mean == 0.0 {
        return Err(CmcError::HypothesisViolated(format!(
            "immersed spheres need H != 0 and 4H^2 + kappa > 0 (H = {h_mean}, kappa = {kappa})"
        )));
    }
    let h_mean = h_mean.abs();
    let space = if kappa == 0 { SpaceParams::euclidean() } else { make_space(kappa as i64, 0.0)? };
    if n < MIN_NODES + 2 * EXTRACTION_TRIM {
        return Err(CmcError::InvalidGrid(format!("sphere needs at least 9 nodes, got {n}")));
    }
    let h = 2.0 * SPHERE_U_HALF_EXTENT / (n - 1) as f64;
    let prof = shoot_profile(kappa, h_mean, CURVE_MAX_STEP.min(h))?;
    let m = prof.rho.len();
    let ones = vec![1.0; m];
    let zeros = vec![0.0; m];
    let g: Vec<f64> = prof.rho.iter().map(|r| sn(kappa, *r).powi(2)).collect();
    let iso = isothermalize_cohomogeneity1(&ones, &zeros, &g, 0.0, prof.dl)?;
    let u = &iso.u;
    let eq = prof.sigma.iter().position(|s| *s >= FRAC_PI_2).unwrap_or(m / 2);
    let u_eq = u[eq];
    if u_eq - SPHERE_U_HALF_EXTENT - 4.0 * h <= u[0] || u_eq + SPHERE_U_HALF_EXTENT + 4.0 * h >= u[m - 1] {
        return Err(CmcError::ShootingFailure("profile too short for the requested patch".into()));
    }

    // profile point at isothermal coordinate `target`
    let at = |target: f64| -> (f64, f64) {
        let k = u.partition_point(|x| *x <= target).clamp(1, m - 1) - 1;
        let (s0, s1) = (sn(kappa, prof.rho[k]), sn(kappa, prof.rho[k + 1]));
        let l0 = k as f64 * prof.dl;
        let l = hermite(u[k], u[k + 1], l0, l0 + prof.dl, s0, s1, target);
        let (c0, c1) = (prof.sigma[k].cos(), prof.sigma[k + 1].cos());
        let (i0, i1) = (prof.sigma[k].sin(), prof.sigma[k + 1].sin());
        let rho = hermite(l0, l0 + prof.dl, prof.rho[k], prof.rho[k + 1], c0, c1, l);
        let height = hermite(l0, l0 + prof.dl, prof.height[k], prof.height[k + 1], i0, i1, l);
        (rho, height)
    };
    let half = 0.5 * (n - 1) as f64 * h;
    let grid = Grid::new(n, SPHERE_NV, h, -half, -0.5 * (SPHERE_NV - 1) as f64 * h)?;
    ImmersedPatch::from_fn(space, grid, h, Parametrization::Isothermal, |uu, v| {
        let (rho, height) = at(u_eq - uu);
        let r = space.chart_radius(rho);
        crate::space::ChartPoint::new(r * v.cos(), r * v.sin(), height)
    })
}

// ---------------------------------------------------------------------------
// Constant-angle family

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SFamilyParams {
    pub space: SpaceParams,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    /// The constant `nu^2`.
    pub nu2: f64,
    /// Intrinsic curvature `(kappa - 4 tau^2) nu^2`.
    #[serde(rename = "K")]
    pub k: f64,
    /// Extrinsic curvature `-tau^2`.
    #[serde(rename = "Ke")]
    pub ke: f64,
}

impl SFamilyParams {
    /// `4H^2 + 4tau^2 + (kappa - 4tau^2)(1 - nu^2)`.
    pub fn angle_residual(&self) -> f64 {
        let (h, tau, b) = (self.mean_curvature, self.space.tau(), self.space.b());
        4.0 * h * h + 4.0 * tau * tau + b * (1.0 - self.nu2)
    }
}

/// Parameters of the constant-angle surfaces with `4H^2 + kappa < 0`:
/// `nu^2 = 1 - 4(H^2 + tau^2) / (4 tau^2 - kappa)`, `K_e = -tau^2`,
/// `K = (kappa - 4 tau^2) nu^2`.
pub fn s_family_params(space: &SpaceParams, h_mean: f64) -> Result<SFamilyParams> {
    let tau = space.tau();
    let lead = 4.0 * h_mean * h_mean + space.kappa_f();
    if lead >= 0.0 {
        return Err(CmcError::NoSFamily { value: lead });
    }
    let nu2 = 1.0 - 4.0 * (h_mean * h_mean + tau * tau) / (4.0 * tau * tau - space.kappa_f());
    if !(nu2 > 0.0 && nu2 < 1.0) {
        return Err(CmcError::NoSFamily { value: lead });
    }
    Ok(SFamilyParams { space: *space, mean_curvature: h_mean, nu2, k: space.b() * nu2, ke: -tau * tau })
}

/// Exact counterpart of [`SFamilyParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct SFamilyExact {
    pub nu2: BigRational,
    pub k: BigRational,
    pub ke: BigRational,
    /// `4H^2 + 4tau^2 + (kappa - 4tau^2)(1 - nu^2)`, zero by construction.
    pub angle_residual: BigRational,
}

/// [`s_family_params`] in rational arithmetic.
pub fn s_family_params_exact(kappa: i64, tau: &BigRational, h_mean: &BigRational) -> Result<SFamilyExact> {
    let kappa_i = check_kappa(kappa)?;
    let k = BigRational::from_integer(BigInt::from(kappa_i));
    let four = BigRational::from_integer(BigInt::from(4));
    let one = BigRational::from_integer(BigInt::from(1));
    let (h2, t2) = (h_mean * h_mean, tau * tau);
    let b = &k - &four * &t2;
    if b.is_zero() {
        return Err(CmcError::DegenerateB);
    }
    let lead = &four * &h2 + &k;
    if !lead.is_negative() {
        return Err(CmcError::NoSFamily { value: rational_to_f64(&lead) });
    }
    let nu2 = &one - &four * (&h2 + &t2) / (&four * &t2 - &k);
    if !(nu2.is_positive() && nu2 < one) {
        return Err(CmcError::NoSFamily { value: rational_to_f64(&lead) });
    }
    let angle_residual = &four * &h2 + &four * &t2 + &b * (&one - &nu2);
    Ok(SFamilyExact { k: &b * &nu2, ke: -t2, nu2, angle_residual })
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------------------
// Synthetic patch for the ln q identity

/// Centre of the synthetic patch in the unit disk.
pub const SYNTHETIC_CENTER: (f64, f64) = (0.5, 0.3);

/// Synthetic data with hyperbolic `lambda = 4/(1 - |w|^2)^2` and `Q = w^2`
/// (`H = 1`, `nu = 1`, `A = 0`, `p = w^2/2` in the space `kappa = -1, tau = 0`),
/// on an `n x n` lattice of spacing `h` centred at [`SYNTHETIC_CENTER`].
///
/// Not a surface: only the `ln q` identity is meaningful on it. Returns the
/// patch and the exact curvature `K = -1`.
pub fn synthetic_dlnq_patch(h: f64, n: usize) -> Result<(DataPatch, ScalarField)> {
    let space = make_space(-1, 0.0)?;
    let half = 0.5 * (n.max(1) - 1) as f64 * h;
    let grid = Grid::new(n, n, h, SYNTHETIC_CENTER.0 - half, SYNTHETIC_CENTER.1 - half)?;
    let corner = (SYNTHETIC_CENTER.0.abs() + half).hypot(SYNTHETIC_CENTER.1.abs() + half);
    if corner >= 1.0 {
        return Err(CmcError::InvalidGrid(format!("synthetic patch leaves the unit disk (corner radius {corner})")));
    }
    let lambda = grid.map(|i, j| 4.0 / (1.0 - grid.w(i, j).norm_sqr()).powi(2));
    let p = grid.map(|i, j| grid.w(i, j).powi(2) / 2.0);
    let d = DataPatch::new(
        space,
        1.0,
        grid,
        lambda,
        p,
        Field::constant(&grid, Complex64::new(0.0, 0.0)),
        Field::constant(&grid, 1.0),
    )?;
    Ok((d, Field::constant(&grid, -1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_circle_closes() {
        let c = gen_curve_constant_kg(0, 1.0, 2.0 * PI, 1e-3).unwrap();
        assert!(c.closure_gap() < 1e-6, "{}", c.closure_gap());
    }

    #[test]
    fn spherical_circle_closes_at_predicted_length() {
        // cot(rho) = 2 => sin(rho) = 1/sqrt(5)
        let len = 2.0 * PI / 5f64.sqrt();
        let c = gen_curve_constant_kg(1, 2.0, len, 1e-3).unwrap();
        assert!(c.closure_gap() < 1e-5, "{}", c.closure_gap());
    }

    #[test]
    fn horocycle_curvature_and_speed() {
        let c = gen_curve_constant_kg(-1, 1.0, 3.0, 1e-3).unwrap();
        for (kg, sp) in c.measured_kg().iter().zip(c.measured_speed()).flat_map(|(a, b)| a.zip(b)) {
            assert!((kg - 1.0).abs() < 1e-6, "{kg}");
            assert!((sp - 1.0).abs() < 1e-8, "{sp}");
        }
        assert!(c.closure_gap() > 0.5);
    }

    #[test]
    fn large_spherical_curve_exits_chart() {
        assert!(matches!(gen_curve_constant_kg(1, 0.0, 4.0, 1e-2), Err(CmcError::ChartExit { .. })));
        assert_eq!(gen_curve_constant_kg(3, 0.0, 1.0, 1e-2), Err(CmcError::InvalidKappa(3)));
    }

    #[test]
    fn curve_csv_has_header_and_rows() {
        let c = gen_curve_constant_kg(0, 1.0, 0.1, 1e-2).unwrap();
        let csv = c.to_csv();
        assert!(csv.starts_with("s,x,y,theta,k_g\n"));
        assert_eq!(csv.lines().count(), c.len() + 1);
    }

    #[test]
    fn sphere_data_anchor_values() {
        let sp = make_space(-1, 0.0).unwrap();
        assert!((g_normalized(&sp, 1.0, 0.0) - 0.75).abs() < 1e-15);
        let d = gen_rotational_sphere_data(&sp, 1.0, 2.0, 401).unwrap();
        assert!(!d.truncated);
        assert!((d.patch.lambda.at(200, 2) - 16.0 / 9.0).abs() < 1e-12);
        assert!(d.patch.unit_tangent_defect() <= 1e-12);
        assert!(matches!(gen_rotational_sphere_data(&sp, 0.5, 2.0, 401), Err(CmcError::HypothesisViolated(_))));
    }

    #[test]
    fn s_family_examples() {
        let sp = make_space(-1, 0.0).unwrap();
        let s = s_family_params(&sp, 0.4).unwrap();
        assert!((s.nu2 - 0.36).abs() < 1e-12 && (s.k + 0.36).abs() < 1e-12);
        assert!(matches!(s_family_params(&sp, 0.5), Err(CmcError::NoSFamily { .. })));
        let s = s_family_params(&make_space(-1, 0.5).unwrap(), 0.25).unwrap();
        assert!((s.nu2 - 0.375).abs() < 1e-12);
        assert!(s.angle_residual().abs() < 1e-15);
    }

    #[test]
    fn s_family_exact_residual_is_zero() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        let s = s_family_params_exact(-1, &r(1, 2), &r(1, 4)).unwrap();
        assert_eq!(s.nu2, r(3, 8));
        assert!(s.angle_residual.is_zero());
        assert!(s_family_params_exact(-1, &r(0, 1), &r(1, 2)).is_err());
    }
}
