//! Chart-level model of the homogeneous spaces E(kappa, tau).
//!
//! All geometries share one rotationally symmetric chart:
//!
//! ```text
//! g = mu^2 (dx^2 + dy^2) + (dz + tau mu (y dx - x dy))^2,   mu = 1 / (1 + kappa (x^2 + y^2) / 4)
//! ```
//!
//! The projection `(x, y, z) -> (x, y)` is a Riemannian submersion onto the
//! base of curvature `kappa`, and `xi = d/dz` is the unit vertical Killing
//! field. Cross products use the orientation of the ordered chart frame
//! `(dx, dy, dz)`; with it, `nabla_X xi = tau X x xi` holds on every
//! E(kappa, tau) with the sign of `tau` as given.

use serde::{Deserialize, Serialize};

use crate::error::{CmcError, Result};

/// Default squared chart radius for `kappa = +1` (and the disk boundary for `kappa = -1`).
pub const DEFAULT_CHART_RADIUS2: f64 = 4.0;

/// Default step for finite-difference Christoffel symbols.
pub const DEFAULT_CHRISTOFFEL_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    /// E(0, 0) = R^3. Outside the nondegenerate family, kept as a flat reference.
    Euclidean,
    H2xR,
    S2xR,
    Berger,
    Heisenberg,
    PslCover,
}

impl Geometry {
    pub fn label(self) -> &'static str {
        match self {
            Geometry::Euclidean => "R3",
            Geometry::H2xR => "H2xR",
            Geometry::S2xR => "S2xR",
            Geometry::Berger => "Berger",
            Geometry::Heisenberg => "Heisenberg",
            Geometry::PslCover => "PSL-cover",
        }
    }
}

/// The pair `(kappa, tau)` with `b = kappa - 4 tau^2` cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    kappa: i32,
    tau: f64,
    b: f64,
    geometry: Geometry,
    chart_radius2: f64,
}

/// Build a nondegenerate E(kappa, tau).
pub fn make_space(kappa: i64, tau: f64) -> Result<SpaceParams> {
    if !(-1..=1).contains(&kappa) {
        return Err(CmcError::InvalidKappa(kappa));
    }
    let kappa = kappa as i32;
    let b = kappa as f64 - 4.0 * tau * tau;
    if b == 0.0 || !tau.is_finite() {
        return Err(CmcError::Degenerate { kappa, tau });
    }
    let geometry = match (kappa, tau == 0.0) {
        (-1, true) => Geometry::H2xR,
        (1, true) => Geometry::S2xR,
        (1, false) => Geometry::Berger,
        (0, false) => Geometry::Heisenberg,
        (-1, false) => Geometry::PslCover,
        _ => unreachable!("kappa = 0, tau = 0 is degenerate"),
    };
    Ok(SpaceParams { kappa, tau, b, geometry, chart_radius2: DEFAULT_CHART_RADIUS2 })
}

impl SpaceParams {
    /// Flat R^3 in the same chart (`kappa = tau = 0`, `b = 0`).
    ///
    /// Anything that divides by `b` treats this space specially.
    pub fn euclidean() -> Self {
        SpaceParams { kappa: 0, tau: 0.0, b: 0.0, geometry: Geometry::Euclidean, chart_radius2: DEFAULT_CHART_RADIUS2 }
    }

    /// Rebuild from serialized `(kappa, tau)`; accepts the flat space.
    pub fn from_pair(kappa: i64, tau: f64) -> Result<Self> {
        if kappa == 0 && tau == 0.0 {
            Ok(Self::euclidean())
        } else {
            make_space(kappa, tau)
        }
    }

    /// Override the squared chart radius used for `kappa = +1`.
    pub fn with_chart_radius2(mut self, r2: f64) -> Self {
        self.chart_radius2 = r2;
        self
    }

    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    pub fn kappa_f(&self) -> f64 {
        self.kappa as f64
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `kappa - 4 tau^2`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `4 (H^2 + tau^2)`, the per-query constant used by the sphere analysis.
    pub fn a6(&self, h: f64) -> f64 {
        4.0 * (h * h + self.tau * self.tau)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn is_degenerate(&self) -> bool {
        self.b == 0.0
    }

    /// Base conformal factor `mu(x, y)`.
    pub fn conformal_factor(&self, x: f64, y: f64) -> f64 {
        1.0 / (1.0 + self.kappa_f() * (x * x + y * y) / 4.0)
    }

    pub fn in_chart(&self, p: &ChartPoint) -> bool {
        let r2 = p.x * p.x + p.y * p.y;
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return false;
        }
        match self.kappa {
            1 => r2 < self.chart_radius2,
            -1 => 1.0 - r2 / 4.0 > 0.0,
            _ => true,
        }
    }

    pub fn check_chart(&self, p: &ChartPoint) -> Result<()> {
        if self.in_chart(p) {
            Ok(())
        } else {
            Err(CmcError::OutOfChart { x: p.x, y: p.y, z: p.z })
        }
    }

    /// Geodesic distance from the base origin to chart radius `r`.
    pub fn base_distance(&self, r: f64) -> f64 {
        match self.kappa {
            1 => 2.0 * (r / 2.0).atan(),
            -1 => 2.0 * (r / 2.0).atanh(),
            _ => r,
        }
    }

    /// Chart radius of a base point at geodesic distance `rho` from the origin.
    pub fn chart_radius(&self, rho: f64) -> f64 {
        match self.kappa {
            1 => 2.0 * (rho / 2.0).tan(),
            -1 => 2.0 * (rho / 2.0).tanh(),
            _ => rho,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ChartPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        ChartPoint { x, y, z }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_coords(c: [f64; 3]) -> Self {
        ChartPoint { x: c[0], y: c[1], z: c[2] }
    }

    fn shifted(&self, axis: usize, delta: f64) -> Self {
        let mut c = self.coords();
        c[axis] += delta;
        Self::from_coords(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector(pub [f64; 3]);

impl TangentVector {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        TangentVector([a, b, c])
    }

    pub fn scaled(&self, s: f64) -> Self {
        TangentVector(self.0.map(|c| c * s))
    }

    pub fn sub(&self, other: &Self) -> Self {
        TangentVector([self.0[0] - other.0[0], self.0[1] - other.0[1], self.0[2] - other.0[2]])
    }
}

/// Chart components `g_ij` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor(pub [[f64; 3]; 3]);

impl MetricTensor {
    pub fn inner(&self, a: &TangentVector, b: &TangentVector) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += self.0[i][j] * a.0[i] * b.0[j];
            }
        }
        acc
    }

    pub fn norm(&self, a: &TangentVector) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    pub fn determinant(&self) -> f64 {
        let g = &self.0;
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }

    pub fn leading_minors(&self) -> [f64; 3] {
        let g = &self.0;
        [g[0][0], g[0][0] * g[1][1] - g[0][1] * g[1][0], self.determinant()]
    }

    pub fn is_symmetric(&self) -> bool {
        let g = &self.0;
        g[0][1] == g[1][0] && g[0][2] == g[2][0] && g[1][2] == g[2][1]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.leading_minors().iter().all(|m| *m > 0.0)
    }

    #[allow(clippy::needless_range_loop)]
    pub fn inverse(&self) -> [[f64; 3]; 3] {
        let g = &self.0;
        let det = self.determinant();
        let mut inv = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                inv[i][j] = (g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]) / det;
            }
        }
        inv
    }

    /// Lower an index.
    pub fn lower(&self, v: &TangentVector) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    /// Metric cross product in the chart orientation.
    pub fn cross(&self, a: &TangentVector, b: &TangentVector) -> TangentVector {
        let (a, b) = (a.0, b.0);
        let lower = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let scale = self.determinant().sqrt();
        let inv = self.inverse();
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = scale * (0..3).map(|l| inv[i][l] * lower[l]).sum::<f64>();
        }
        TangentVector(out)
    }
}

fn metric_components(space: &SpaceParams, p: &ChartPoint) -> [[f64; 3]; 3] {
    let mu = space.conformal_factor(p.x, p.y);
    let wx = space.tau * mu * p.y;
    let wy = -space.tau * mu * p.x;
    let m2 = mu * mu;
    [[m2 + wx * wx, wx * wy, wx], [wx * wy, m2 + wy * wy, wy], [wx, wy, 1.0]]
}

pub fn metric_at(space: &SpaceParams, p: &ChartPoint) -> Result<MetricTensor> {
    space.check_chart(p)?;
    Ok(MetricTensor(metric_components(space, p)))
}

pub fn vertical_field_at(space: &SpaceParams, p: &ChartPoint) -> Result<TangentVector> {
    space.check_chart(p)?;
    Ok(TangentVector::new(0.0, 0.0, 1.0))
}

/// Central-difference order used for metric derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Second,
    Fourth,
}

/// `Gamma[i][j][k] = Gamma^i_{jk}` from finite differences of the metric.
pub type Christoffel = [[[f64; 3]; 3]; 3];

#[allow(clippy::needless_range_loop)]
pub fn christoffel(space: &SpaceParams, p: &ChartPoint, step: f64, stencil: Stencil) -> Result<Christoffel> {
    let g = metric_at(space, p)?;
    let mut dg = [[[0.0; 3]; 3]; 3]; // dg[l][i][j] = d_l g_ij
    for (l, dgl) in dg.iter_mut().enumerate() {
        let sample = |k: f64| metric_at(space, &p.shifted(l, k * step)).map(|m| m.0);
        *dgl = match stencil {
            Stencil::Second => {
                let (gp, gm) = (sample(1.0)?, sample(-1.0)?);
                let mut d = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        d[i][j] = (gp[i][j] - gm[i][j]) / (2.0 * step);
                    }
                }
                d
            }
            Stencil::Fourth => {
                let (gp2, gp, gm, gm2) = (sample(2.0)?, sample(1.0)?, sample(-1.0)?, sample(-2.0)?);
                let mut d = [[0.0; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        d[i][j] = (-gp2[i][j] + 8.0 * gp[i][j] - 8.0 * gm[i][j] + gm2[i][j]) / (12.0 * step);
                    }
                }
                d
            }
        };
    }
    let inv = g.inverse();
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (i, gi) in gamma.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                gi[j][k] = 0.5 * (0..3).map(|l| inv[i][l] * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k])).sum::<f64>();
            }
        }
    }
    Ok(gamma)
}

/// Covariant derivative along `x` of a vector field with chart derivative
/// `dy` (already contracted with `x`) and value `y`: `dy + Gamma(x, y)`.
#[allow(clippy::needless_range_loop)]
pub fn covariant(gamma: &Christoffel, x: &TangentVector, y: &TangentVector, dy: &TangentVector) -> TangentVector {
    let mut out = dy.0;
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                *o += gamma[i][j][k] * x.0[j] * y.0[k];
            }
        }
    }
    TangentVector(out)
}

/// Metric norm of `nabla_X xi - tau X x xi`, Christoffel symbols by central
/// differences with step `h`.
pub fn check_killing_identity(space: &SpaceParams, p: &ChartPoint, x: &TangentVector, h: f64) -> Result<f64> {
    let gamma = christoffel(space, p, h, Stencil::Second)?;
    let g = metric_at(space, p)?;
    let xi = vertical_field_at(space, p)?;
    let lhs = covariant(&gamma, x, &xi, &TangentVector::new(0.0, 0.0, 0.0));
    let rhs = g.cross(x, &xi).scaled(space.tau);
    Ok(g.norm(&lhs.sub(&rhs)))
}

/// Curvature of the base recovered from the horizontal part of the chart
/// metric, `K = -Laplacian(ln mu^2) / (2 mu^2)`, by central differences.
pub fn base_curvature_fd(space: &SpaceParams, x: f64, y: f64, h: f64) -> Result<f64> {
    let horiz = |dx: f64, dy: f64| -> Result<f64> {
        let g = metric_at(space, &ChartPoint::new(x + dx, y + dy, 0.0))?.0;
        Ok((g[0][0] - g[0][2] * g[0][2] / g[2][2]).ln())
    };
    let c = horiz(0.0, 0.0)?;
    let lap = (horiz(h, 0.0)? + horiz(-h, 0.0)? + horiz(0.0, h)? + horiz(0.0, -h)? - 4.0 * c) / (h * h);
    Ok(-lap / (2.0 * c.exp()))
}
