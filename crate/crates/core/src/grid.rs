//! Uniform rectangular parameter grids, node fields and finite-difference
//! operators.
//!
//! Nodes are indexed `(i, j)` with `i` along `u` and `j` along `v`; storage
//! is row-major with `v` fastest. Derivatives are central in the interior
//! and second-order one-sided on the border rows. Reports only ever read
//! interior nodes.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CmcError, Result};
use crate::par;

pub const MIN_NODES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
    pub h: f64,
    pub u0: f64,
    pub v0: f64,
}

impl Grid {
    pub fn new(nu: usize, nv: usize, h: f64, u0: f64, v0: f64) -> Result<Self> {
        if nu < MIN_NODES || nv < MIN_NODES {
            return Err(CmcError::InvalidGrid(format!("grid must be at least {MIN_NODES}x{MIN_NODES}, got {nu}x{nv}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(CmcError::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        Ok(Grid { nu, nv, h, u0, v0 })
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k / self.nv, k % self.nv)
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.h
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.h
    }

    /// Complex coordinate `w = u + i v` of a node.
    pub fn w(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.u(i), self.v(j))
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i >= 1 && j >= 1 && i + 1 < self.nu && j + 1 < self.nv
    }

    pub fn interior_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.nu - 1).flat_map(move |i| (1..self.nv - 1).map(move |j| self.idx(i, j)))
    }

    pub fn interior_count(&self) -> usize {
        (self.nu - 2) * (self.nv - 2)
    }

    /// Evaluate a node function over the whole grid.
    pub fn map<T, F>(&self, f: F) -> Field<T>
    where
        T: Send,
        F: Fn(usize, usize) -> T + Sync + Send,
    {
        let nv = self.nv;
        Field { nu: self.nu, nv, data: par::map_indices(self.len(), |k| f(k / nv, k % nv)) }
    }

    /// Sub-grid covering `i in i_range`, `j in j_range`.
    pub fn sub(&self, i_range: std::ops::Range<usize>, j_range: std::ops::Range<usize>) -> Result<Grid> {
        Grid::new(i_range.len(), j_range.len(), self.h, self.u(i_range.start), self.v(j_range.start))
    }

    pub fn du<T: FieldValue>(&self, f: &Field<T>) -> Field<T> {
        self.map(|i, j| first(self.nu, self.h, |k| f.data[self.idx(k, j)], i))
    }

    pub fn dv<T: FieldValue>(&self, f: &Field<T>) -> Field<T> {
        self.map(|i, j| first(self.nv, self.h, |k| f.data[self.idx(i, k)], j))
    }

    pub fn duu<T: FieldValue>(&self, f: &Field<T>) -> Field<T> {
        self.map(|i, j| second(self.nu, self.h, |k| f.data[self.idx(k, j)], i))
    }

    pub fn dvv<T: FieldValue>(&self, f: &Field<T>) -> Field<T> {
        self.map(|i, j| second(self.nv, self.h, |k| f.data[self.idx(i, k)], j))
    }

    /// Flat Laplacian `d_uu + d_vv` (five-point stencil in the interior).
    pub fn laplacian0<T: FieldValue>(&self, f: &Field<T>) -> Field<T> {
        let (a, b) = (self.duu(f), self.dvv(f));
        a.zip_with(&b, |x, y| x + y)
    }

    /// `d/dz = (d_u - i d_v) / 2`.
    pub fn dz(&self, f: &Field<Complex64>) -> Field<Complex64> {
        let (fu, fv) = (self.du(f), self.dv(f));
        fu.zip_with(&fv, |a, b| 0.5 * (a - Complex64::i() * b))
    }

    /// `d/dz-bar = (d_u + i d_v) / 2`.
    pub fn dzbar(&self, f: &Field<Complex64>) -> Field<Complex64> {
        let (fu, fv) = (self.du(f), self.dv(f));
        fu.zip_with(&fv, |a, b| 0.5 * (a + Complex64::i() * b))
    }
}

fn first<T: FieldValue>(n: usize, h: f64, f: impl Fn(usize) -> T, k: usize) -> T {
    if k == 0 {
        (f(1) * 4.0 - f(0) * 3.0 - f(2)) * (0.5 / h)
    } else if k + 1 == n {
        (f(k) * 3.0 - f(k - 1) * 4.0 + f(k - 2)) * (0.5 / h)
    } else {
        (f(k + 1) - f(k - 1)) * (0.5 / h)
    }
}

fn second<T: FieldValue>(n: usize, h: f64, f: impl Fn(usize) -> T, k: usize) -> T {
    let s = 1.0 / (h * h);
    if k == 0 {
        (f(0) * 2.0 - f(1) * 5.0 + f(2) * 4.0 - f(3)) * s
    } else if k + 1 == n {
        (f(k) * 2.0 - f(k - 1) * 5.0 + f(k - 2) * 4.0 - f(k - 3)) * s
    } else {
        (f(k + 1) - f(k) * 2.0 + f(k - 1)) * s
    }
}

pub trait FieldValue: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T> FieldValue for T where T: Copy + Send + Sync + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Per-node values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    pub nu: usize,
    pub nv: usize,
    pub data: Vec<T>,
}

pub type ScalarField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: Copy + Send + Sync> Field<T> {
    pub fn constant(grid: &Grid, value: T) -> Self {
        Field { nu: grid.nu, nv: grid.nv, data: vec![value; grid.len()] }
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.nv + j]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn matches(&self, grid: &Grid) -> bool {
        self.nu == grid.nu && self.nv == grid.nv && self.data.len() == grid.len()
    }

    pub fn map<U: Send, F: Fn(T) -> U + Sync + Send>(&self, f: F) -> Field<U> {
        Field { nu: self.nu, nv: self.nv, data: par::map_slice(&self.data, |x| f(*x)) }
    }

    pub fn zip_with<U: Copy + Sync, V: Send, F: Fn(T, U) -> V + Sync + Send>(
        &self,
        other: &Field<U>,
        f: F,
    ) -> Field<V> {
        assert_eq!((self.nu, self.nv), (other.nu, other.nv), "field shapes differ");
        let nv = self.nv;
        Field { nu: self.nu, nv, data: par::map_indices(self.data.len(), |k| f(self.data[k], other.data[k])) }
    }

    pub fn sub_field(&self, i_range: std::ops::Range<usize>, j_range: std::ops::Range<usize>) -> Self {
        let mut data = Vec::with_capacity(i_range.len() * j_range.len());
        for i in i_range.clone() {
            for j in j_range.clone() {
                data.push(self.at(i, j));
            }
        }
        Field { nu: i_range.len(), nv: j_range.len(), data }
    }
}

impl ScalarField {
    /// `(min, max)` over the interior of `grid`.
    pub fn interior_range(&self, grid: &Grid) -> (f64, f64) {
        grid.interior_indices()
            .map(|k| self.data[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }

    pub fn interior_sup_abs(&self, grid: &Grid) -> f64 {
        grid.interior_indices().map(|k| self.data[k].abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(11, 9, 0.1, -0.3, 0.2).unwrap()
    }

    #[test]
    fn rejects_small_grids() {
        assert!(Grid::new(4, 9, 0.1, 0.0, 0.0).is_err());
        assert!(Grid::new(5, 5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn derivatives_exact_on_quadratics_including_borders() {
        let g = grid();
        let f = g.map(|i, j| {
            let (u, v) = (g.u(i), g.v(j));
            3.0 * u * u - 2.0 * u * v + v * v + u
        });
        let (fu, fv, fuu, fvv) = (g.du(&f), g.dv(&f), g.duu(&f), g.dvv(&f));
        for i in 0..g.nu {
            for j in 0..g.nv {
                let (u, v) = (g.u(i), g.v(j));
                assert!((fu.at(i, j) - (6.0 * u - 2.0 * v + 1.0)).abs() < 1e-12);
                assert!((fv.at(i, j) - (-2.0 * u + 2.0 * v)).abs() < 1e-12);
                assert!((fuu.at(i, j) - 6.0).abs() < 1e-10);
                assert!((fvv.at(i, j) - 2.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dzbar_kills_holomorphic_polynomials() {
        let g = grid();
        let f = g.map(|i, j| g.w(i, j) * g.w(i, j));
        let d = g.dzbar(&f);
        let dz = g.dz(&f);
        for k in g.interior_indices() {
            let (i, j) = g.ij(k);
            assert!(d.data[k].norm() < 1e-12);
            assert!((dz.data[k] - 2.0 * g.w(i, j)).norm() < 1e-12);
        }
    }

    #[test]
    fn laplacian_of_saddle_vanishes() {
        let g = grid();
        let f = g.map(|i, j| g.u(i).powi(2) - g.v(j).powi(2));
        assert!(g.laplacian0(&f).interior_sup_abs(&g) < 1e-8);
    }

    #[test]
    fn sub_field_picks_block() {
        let g = grid();
        let f = g.map(|i, j| (i * 100 + j) as f64);
        let s = f.sub_field(2..7, 1..6);
        assert_eq!(s.shape(), (5, 5));
        assert_eq!(s.at(0, 0), 201.0);
        assert_eq!(s.at(4, 4), 605.0);
    }
}
