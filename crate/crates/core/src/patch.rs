//! Surface patches: ambient immersions in the chart and the fundamental
//! data `(lambda, p, A, nu, H)` everything downstream is verified on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ar::ArField;
use crate::error::{CmcError, Result};
use crate::grid::{ComplexField, Field, Grid, ScalarField, MIN_NODES};
use crate::numerics::cumulative_simpson;
use crate::space::{
    christoffel, covariant, metric_at, vertical_field_at, ChartPoint, SpaceParams, Stencil, TangentVector,
};

/// Layers dropped on each side by the fourth-order extraction stencils.
pub const EXTRACTION_TRIM: usize = 2;

/// Step used for the Christoffel symbols during extraction.
pub const EXTRACTION_CHRISTOFFEL_STEP: f64 = 1e-3;

/// Relative tolerance for the isothermal test in [`extract_data`].
pub const DEFAULT_ISOTHERMAL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    Isothermal,
    Cohomogeneity1,
    General,
}

/// A surface given by chart positions on a uniform `(u, v)` lattice.
#[derive(Debug, Clone)]
pub struct ImmersedPatch {
    pub space: SpaceParams,
    pub nu: usize,
    pub nv: usize,
    pub hu: f64,
    pub hv: f64,
    pub u0: f64,
    pub v0: f64,
    pub positions: Vec<ChartPoint>,
    pub tag: Parametrization,
}

impl ImmersedPatch {
    /// Sample `position(u, v)` on the lattice, checking the chart domain.
    pub fn from_fn<F>(space: SpaceParams, grid: Grid, hv: f64, tag: Parametrization, position: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> ChartPoint,
    {
        let mut positions = Vec::with_capacity(grid.len());
        for i in 0..grid.nu {
            for j in 0..grid.nv {
                let p = position(grid.u(i), grid.v0 + j as f64 * hv);
                space.check_chart(&p)?;
                positions.push(p);
            }
        }
        Ok(ImmersedPatch { space, nu: grid.nu, nv: grid.nv, hu: grid.h, hv, u0: grid.u0, v0: grid.v0, positions, tag })
    }

    pub fn at(&self, i: usize, j: usize) -> ChartPoint {
        self.positions[i * self.nv + j]
    }

    fn coord(&self, i: usize, j: usize) -> [f64; 3] {
        self.at(i, j).coords()
    }

    fn check_size(&self) -> Result<()> {
        let need = MIN_NODES + 2 * EXTRACTION_TRIM;
        if self.nu < need || self.nv < need {
            return Err(CmcError::InvalidGrid(format!(
                "immersed patch needs at least {need}x{need} nodes, got {}x{}",
                self.nu, self.nv
            )));
        }
        Ok(())
    }
}

fn d1(f: [[f64; 3]; 5], h: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = (-f[4][c] + 8.0 * f[3][c] - 8.0 * f[1][c] + f[0][c]) / (12.0 * h);
    }
    out
}

fn d2(f: [[f64; 3]; 5], h: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for c in 0..3 {
        out[c] = (-f[4][c] + 16.0 * f[3][c] - 30.0 * f[2][c] + 16.0 * f[1][c] - f[0][c]) / (12.0 * h * h);
    }
    out
}

/// First and second fundamental quantities at one node.
struct NodeGeometry {
    xu: TangentVector,
    xv: TangentVector,
    e: f64,
    f: f64,
    g: f64,
    l: f64,
    m: f64,
    n: f64,
    normal: TangentVector,
    xi_u: f64,
    xi_v: f64,
}

fn node_geometry(patch: &ImmersedPatch, i: usize, j: usize) -> Result<NodeGeometry> {
    let row = |k: isize| -> [[f64; 3]; 5] {
        let ii = (i as isize + k) as usize;
        [-2isize, -1, 0, 1, 2].map(|d| patch.coord(ii, (j as isize + d) as usize))
    };
    let col = [-2isize, -1, 0, 1, 2].map(|d| patch.coord((i as isize + d) as usize, j));
    let xu = d1(col, patch.hu);
    let xuu = d2(col, patch.hu);
    let center = row(0);
    let xv = d1(center, patch.hv);
    let xvv = d2(center, patch.hv);
    let xv_rows = [-2isize, -1, 0, 1, 2].map(|k| d1(row(k), patch.hv));
    let xuv = d1(xv_rows, patch.hu);

    let p = patch.at(i, j);
    let metric = metric_at(&patch.space, &p)?;
    let gamma = christoffel(&patch.space, &p, EXTRACTION_CHRISTOFFEL_STEP, Stencil::Fourth)?;
    let xi = vertical_field_at(&patch.space, &p)?;
    let (xu, xv) = (TangentVector(xu), TangentVector(xv));
    let e = metric.inner(&xu, &xu);
    let f = metric.inner(&xu, &xv);
    let g = metric.inner(&xv, &xv);
    let area2 = e * g - f * f;
    if !(area2 > 0.0) || !area2.is_finite() {
        return Err(CmcError::DegenerateImmersion { i, j });
    }
    let cross = metric.cross(&xu, &xv);
    let normal = cross.scaled(1.0 / metric.norm(&cross));
    let nuu = covariant(&gamma, &xu, &xu, &TangentVector(xuu));
    let nuv = covariant(&gamma, &xu, &xv, &TangentVector(xuv));
    let nvv = covariant(&gamma, &xv, &xv, &TangentVector(xvv));
    Ok(NodeGeometry {
        e,
        f,
        g,
        l: metric.inner(&nuu, &normal),
        m: metric.inner(&nuv, &normal),
        n: metric.inner(&nvv, &normal),
        xi_u: metric.inner(&xi, &xu),
        xi_v: metric.inner(&xi, &xv),
        normal: TangentVector(normal.0),
        xu,
        xv,
    })
}

/// Grid of the nodes an extraction reports on.
fn trimmed_grid(patch: &ImmersedPatch) -> Result<Grid> {
    patch.check_size()?;
    let t = EXTRACTION_TRIM;
    Grid::new(
        patch.nu - 2 * t,
        patch.nv - 2 * t,
        patch.hu,
        patch.u0 + t as f64 * patch.hu,
        patch.v0 + t as f64 * patch.hv,
    )
}

fn geometry_on_trimmed(patch: &ImmersedPatch, grid: &Grid) -> Result<Vec<NodeGeometry>> {
    let t = EXTRACTION_TRIM;
    let raw: Vec<Result<NodeGeometry>> =
        crate::par::map_indices(grid.len(), |k| node_geometry(patch, k / grid.nv + t, k % grid.nv + t));
    raw.into_iter().collect()
}

/// Pointwise mean curvature `(L G - 2 M F + N E) / (2 (E G - F^2))` on the
/// trimmed grid, with respect to `N = X_u x X_v / |X_u x X_v|`.
pub fn mean_curvature_field(patch: &ImmersedPatch) -> Result<(Grid, ScalarField)> {
    let grid = trimmed_grid(patch)?;
    let geo = geometry_on_trimmed(patch, &grid)?;
    let data =
        geo.iter().map(|n| (n.l * n.g - 2.0 * n.m * n.f + n.n * n.e) / (2.0 * (n.e * n.g - n.f * n.f))).collect();
    Ok((grid, Field { nu: grid.nu, nv: grid.nv, data }))
}

/// Fundamental data of a constant mean curvature patch in isothermal
/// coordinates `w = u + i v`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPatch {
    pub space: SpaceParams,
    /// Mean curvature `H` (measured mean when extracted).
    pub mean_curvature: f64,
    pub grid: Grid,
    pub lambda: ScalarField,
    pub p: ComplexField,
    pub a: ComplexField,
    pub nu: ScalarField,
    /// Spread of the pointwise mean curvature, when measured from an immersion.
    pub h_spread: Option<f64>,
}

impl DataPatch {
    pub fn new(
        space: SpaceParams,
        mean_curvature: f64,
        grid: Grid,
        lambda: ScalarField,
        p: ComplexField,
        a: ComplexField,
        nu: ScalarField,
    ) -> Result<Self> {
        if !(lambda.matches(&grid) && p.matches(&grid) && a.matches(&grid) && nu.matches(&grid)) {
            return Err(CmcError::InvalidGrid("field shape does not match grid".into()));
        }
        if let Some(k) = lambda.data.iter().position(|l| !(*l > 0.0)) {
            let (i, j) = grid.ij(k);
            return Err(CmcError::DegenerateImmersion { i, j });
        }
        if let Some(k) = nu.data.iter().position(|n| !(n.abs() <= 1.0 + 1e-12)) {
            return Err(CmcError::InvalidGrid(format!("|nu| > 1 at node {:?}", grid.ij(k))));
        }
        Ok(DataPatch { space, mean_curvature, grid, lambda, p, a, nu, h_spread: None })
    }

    /// `sup |4|A|^2 - lambda (1 - nu^2)|` over all nodes.
    pub fn unit_tangent_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| (4.0 * self.a.data[k].norm_sqr() - self.lambda.data[k] * (1.0 - self.nu.data[k].powi(2))).abs())
            .fold(0.0, f64::max)
    }

    /// Squared norm of the tangential part `T = (2/lambda)(conj(A) d_z + A d_zbar)`,
    /// which in real coordinates is `(2/lambda)(Re A d_u - Im A d_v)`.
    pub fn tangent_norm2(&self) -> ScalarField {
        self.grid.map(|i, j| {
            let k = self.grid.idx(i, j);
            let (a, l) = (self.a.data[k], self.lambda.data[k]);
            let (tu, tv) = (2.0 * a.re / l, -2.0 * a.im / l);
            l * (tu * tu + tv * tv)
        })
    }

    /// Conformal rescaling `w -> c w`: `lambda / c^2`, `p / c^2`, `A / c`.
    pub fn rescaled(&self, c: f64) -> DataPatch {
        let grid = Grid { h: self.grid.h * c, u0: self.grid.u0 * c, v0: self.grid.v0 * c, ..self.grid };
        DataPatch {
            grid,
            lambda: self.lambda.map(|l| l / (c * c)),
            p: self.p.map(|p| p / (c * c)),
            a: self.a.map(|a| a / c),
            ..self.clone()
        }
    }

    /// Block `i in i_range`, `j in j_range` as its own patch.
    pub fn subpatch(&self, i_range: std::ops::Range<usize>, j_range: std::ops::Range<usize>) -> Result<DataPatch> {
        let grid = self.grid.sub(i_range.clone(), j_range.clone())?;
        Ok(DataPatch {
            grid,
            lambda: self.lambda.sub_field(i_range.clone(), j_range.clone()),
            p: self.p.sub_field(i_range.clone(), j_range.clone()),
            a: self.a.sub_field(i_range.clone(), j_range.clone()),
            nu: self.nu.sub_field(i_range, j_range),
            ..self.clone()
        })
    }
}

/// Extract `(lambda, p, A, nu, H)` from an isothermal immersion.
///
/// Derivatives use fourth-order central stencils, so the returned patch is
/// the input lattice minus [`EXTRACTION_TRIM`] layers on every side. The
/// normal is `X_u x X_v` unless `nu` is not identically zero and positive at
/// the anchor node `(0, 0)`; in that case the normal is flipped and the `v`
/// axis reflected so that `(X_u, X_v, N)` stays positively oriented.
pub fn extract_data(patch: &ImmersedPatch) -> Result<DataPatch> {
    extract_data_with_tol(patch, DEFAULT_ISOTHERMAL_TOL)
}

pub fn extract_data_with_tol(patch: &ImmersedPatch, tol: f64) -> Result<DataPatch> {
    if patch.tag != Parametrization::Isothermal {
        return Err(CmcError::NotIsothermal { i: 0, j: 0, detail: format!("parametrization tagged {:?}", patch.tag) });
    }
    if (patch.hu - patch.hv).abs() > 1e-12 * patch.hu {
        return Err(CmcError::NotIsothermal { i: 0, j: 0, detail: "unequal lattice spacings".into() });
    }
    let grid = trimmed_grid(patch)?;
    let geo = geometry_on_trimmed(patch, &grid)?;
    for (k, n) in geo.iter().enumerate() {
        let (i, j) = grid.ij(k);
        let lambda = n.e;
        if lambda < tol {
            return Err(CmcError::DegenerateImmersion { i, j });
        }
        if n.f.abs() > tol * lambda || (n.e - n.g).abs() > tol * lambda {
            return Err(CmcError::NotIsothermal { i, j, detail: format!("E = {}, F = {}, G = {}", n.e, n.f, n.g) });
        }
    }
    let nu_raw: Vec<f64> = geo
        .iter()
        .zip(0..)
        .map(|(n, k)| {
            let p = patch.at(grid.ij(k).0 + EXTRACTION_TRIM, grid.ij(k).1 + EXTRACTION_TRIM);
            let m = metric_at(&patch.space, &p).expect("checked in node_geometry");
            m.inner(&n.normal, &TangentVector::new(0.0, 0.0, 1.0))
        })
        .collect();
    let nu_nonzero = nu_raw.iter().any(|v| v.abs() > 1e-10);
    let flip = nu_nonzero && nu_raw[0] > 0.0;

    let mut lambda = Vec::with_capacity(grid.len());
    let mut p = Vec::with_capacity(grid.len());
    let mut a = Vec::with_capacity(grid.len());
    let mut nu = Vec::with_capacity(grid.len());
    let mut hs = Vec::with_capacity(grid.len());
    for (n, nv) in geo.iter().zip(&nu_raw) {
        let l = n.e;
        lambda.push(l);
        p.push(Complex64::new((n.l - n.n) / 4.0, -n.m / 2.0));
        a.push(Complex64::new(0.5 * n.xi_u, -0.5 * n.xi_v));
        nu.push(*nv);
        hs.push((n.l * n.g - 2.0 * n.m * n.f + n.n * n.e) / (2.0 * (n.e * n.g - n.f * n.f)));
        debug_assert!(n.xu.0.iter().chain(n.xv.0.iter()).all(|c| c.is_finite()));
    }
    let mut out_grid = grid;
    if flip {
        // reflect v -> -v: p -> -conj(p), A -> conj(A), nu -> -nu, H -> -H
        fn reflect<T>(data: &mut [T], nv: usize) {
            data.chunks_mut(nv).for_each(|row| row.reverse());
        }
        reflect(&mut lambda, grid.nv);
        reflect(&mut p, grid.nv);
        reflect(&mut a, grid.nv);
        reflect(&mut nu, grid.nv);
        reflect(&mut hs, grid.nv);
        p.iter_mut().for_each(|z| *z = -z.conj());
        a.iter_mut().for_each(|z| *z = z.conj());
        nu.iter_mut().for_each(|v| *v = -*v);
        hs.iter_mut().for_each(|v| *v = -*v);
        out_grid.v0 = -(grid.v0 + (grid.nv - 1) as f64 * grid.h);
    }
    let h_mean = crate::numerics::compensated_mean(&hs);
    let (lo, hi) = hs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
    let mut d = DataPatch::new(
        patch.space,
        h_mean,
        out_grid,
        Field { nu: grid.nu, nv: grid.nv, data: lambda },
        Field { nu: grid.nu, nv: grid.nv, data: p },
        Field { nu: grid.nu, nv: grid.nv, data: a },
        Field { nu: grid.nu, nv: grid.nv, data: nu },
    )?;
    d.h_spread = Some(hi - lo);
    Ok(d)
}

/// Conformal reparametrization of a cohomogeneity-one metric
/// `E(s) ds^2 + 2 F(s) ds dt + G(s) dt^2` on uniform `s` samples.
///
/// With `t' = t + int F/G ds` and `u = int sqrt((E - F^2/G) / G) ds` the
/// metric becomes `G(s) (du^2 + dt'^2)`. For `G = 1` this is
/// `u = int sqrt(E - F^2) ds`. Both integrals use cumulative Simpson.
#[derive(Debug, Clone, PartialEq)]
pub struct IsothermalMap {
    pub s0: f64,
    pub ds: f64,
    /// `u(s_k)`, zero at `s0`.
    pub u: Vec<f64>,
    /// `int_0^{s_k} F/G ds`, added to `t`.
    pub t_shift: Vec<f64>,
    /// Conformal factor `G(s_k)` in the new coordinates.
    pub lambda: Vec<f64>,
}

impl IsothermalMap {
    /// Image of the sample `(s_k, t)`.
    pub fn map(&self, k: usize, t: f64) -> (f64, f64) {
        (self.u[k], t + self.t_shift[k])
    }
}

pub fn isothermalize_cohomogeneity1(e: &[f64], f: &[f64], g: &[f64], s0: f64, ds: f64) -> Result<IsothermalMap> {
    let n = e.len();
    if f.len() != n || g.len() != n {
        return Err(CmcError::InvalidGrid("E, F, G sample counts differ".into()));
    }
    let mut speed = Vec::with_capacity(n);
    let mut shift_rate = Vec::with_capacity(n);
    for k in 0..n {
        let reduced = e[k] - f[k] * f[k] / g[k];
        if !(reduced > 0.0) || !(g[k] > 0.0) {
            return Err(CmcError::DegenerateMetric { s: s0 + k as f64 * ds });
        }
        speed.push((reduced / g[k]).sqrt());
        shift_rate.push(f[k] / g[k]);
    }
    Ok(IsothermalMap {
        s0,
        ds,
        u: cumulative_simpson(&speed, ds),
        t_shift: cumulative_simpson(&shift_rate, ds),
        lambda: g.to_vec(),
    })
}

/// Closed-form coefficient functions sampled on `[s0, s0 + (n-1) ds]`.
pub fn isothermalize_fns<E, F, G>(e: E, f: F, g: G, s0: f64, ds: f64, n: usize) -> Result<IsothermalMap>
where
    E: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let s: Vec<f64> = (0..n).map(|k| s0 + k as f64 * ds).collect();
    let sample = |h: &dyn Fn(f64) -> f64| s.iter().map(|x| h(*x)).collect::<Vec<_>>();
    isothermalize_cohomogeneity1(&sample(&e), &sample(&f), &sample(&g), s0, ds)
}

// ---------------------------------------------------------------------------
// JSON envelope

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridJson {
    pub nu: usize,
    pub nv: usize,
    pub h: f64,
    pub u0: f64,
    pub v0: f64,
}

/// Flat JSON form of a [`DataPatch`], optionally carrying its `q` field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataPatchJson {
    pub kappa: i64,
    pub tau: f64,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_spread: Option<f64>,
    pub grid: GridJson,
    pub lambda: Vec<f64>,
    pub p: Vec<[f64; 2]>,
    #[serde(rename = "A")]
    pub a: Vec<[f64; 2]>,
    pub nu: Vec<f64>,
    #[serde(rename = "Q_re", default, skip_serializing_if = "Option::is_none")]
    pub q_re: Option<Vec<f64>>,
    #[serde(rename = "Q_im", default, skip_serializing_if = "Option::is_none")]
    pub q_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<bool>>,
}

impl DataPatchJson {
    pub fn from_patch(d: &DataPatch, ar: Option<&ArField>) -> Self {
        let pair = |z: &Complex64| [z.re, z.im];
        DataPatchJson {
            kappa: d.space.kappa() as i64,
            tau: d.space.tau(),
            mean_curvature: d.mean_curvature,
            h_spread: d.h_spread,
            grid: GridJson { nu: d.grid.nu, nv: d.grid.nv, h: d.grid.h, u0: d.grid.u0, v0: d.grid.v0 },
            lambda: d.lambda.data.clone(),
            p: d.p.data.iter().map(pair).collect(),
            a: d.a.data.iter().map(pair).collect(),
            nu: d.nu.data.clone(),
            q_re: ar.map(|f| f.q_dz2.data.iter().map(|z| z.re).collect()),
            q_im: ar.map(|f| f.q_dz2.data.iter().map(|z| z.im).collect()),
            q: ar.map(|f| f.q.data.clone()),
            mask: ar.map(|f| f.zero_mask.data.clone()),
        }
    }

    pub fn to_patch(&self) -> Result<DataPatch> {
        let space = SpaceParams::from_pair(self.kappa, self.tau)?;
        let g = &self.grid;
        let grid = Grid::new(g.nu, g.nv, g.h, g.u0, g.v0)?;
        let cx =
            |v: &[[f64; 2]]| Field { nu: g.nu, nv: g.nv, data: v.iter().map(|z| Complex64::new(z[0], z[1])).collect() };
        let real = |v: &[f64]| Field { nu: g.nu, nv: g.nv, data: v.to_vec() };
        let mut d = DataPatch::new(
            space,
            self.mean_curvature,
            grid,
            real(&self.lambda),
            cx(&self.p),
            cx(&self.a),
            real(&self.nu),
        )?;
        d.h_spread = self.h_spread;
        Ok(d)
    }
}

pub fn to_json_string(d: &DataPatch, ar: Option<&ArField>) -> String {
    serde_json::to_string(&DataPatchJson::from_patch(d, ar)).expect("finite data serializes")
}

pub fn from_json_str(s: &str) -> std::result::Result<DataPatch, Box<dyn std::error::Error + Send + Sync>> {
    let j: DataPatchJson = serde_json::from_str(s)?;
    Ok(j.to_patch()?)
}
