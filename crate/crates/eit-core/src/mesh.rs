//! Discretizations shared by every module: polar grid on the unit disk with
//! midpoint quadrature, equispaced boundary ring, and the spectral-parameter
//! grid in the lambda plane.

use alloc::vec::Vec;

use crate::num::{c64, ksum, C64};
use crate::{Error, Result};

/// Tensor-product polar grid on the unit disk.
///
/// Radial nodes sit at cell midpoints `r_j = (j + 1/2) h_r`, so no node hits
/// the coordinate singularity at the origin and none reaches `|z| = 1`. The
/// midpoint weights sum to pi exactly up to rounding.
#[derive(Debug, Clone)]
pub struct DiskGrid {
    pub n_radial: usize,
    pub n_angular: usize,
    pub nodes: Vec<C64>,
    pub weights: Vec<f64>,
    /// true where the full 5-point polar stencil stays inside the grid
    pub interior_mask: Vec<bool>,
}

impl DiskGrid {
    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn idx(&self, j_radial: usize, k_angular: usize) -> usize {
        j_radial * self.n_angular + k_angular
    }

    #[inline]
    pub fn radius(&self, j_radial: usize) -> f64 {
        (j_radial as f64 + 0.5) / self.n_radial as f64
    }

    /// Mesh parameter: the larger of the radial spacing and the outermost
    /// angular arc length.
    pub fn h(&self) -> f64 {
        let hr = 1.0 / self.n_radial as f64;
        let ht = core::f64::consts::TAU / self.n_angular as f64;
        hr.max(ht)
    }

    /// Sample a scalar function on the nodes.
    pub fn sample(&self, f: impl Fn(C64) -> C64) -> Vec<C64> {
        self.nodes.iter().map(|&z| f(z)).collect()
    }
}

/// Build the polar disk grid. `n_angular` must be even so that the grid is
/// closed under z -> -z and z -> conj(z); both symmetries are relied on by
/// the conjugation tests downstream.
pub fn build_disk_grid(n_radial: usize, n_angular: usize) -> Result<DiskGrid> {
    if n_radial < 4 {
        return Err(Error::InvalidArgument("build_disk_grid: n_radial must be >= 4"));
    }
    if n_angular < 8 || n_angular % 2 != 0 {
        return Err(Error::InvalidArgument("build_disk_grid: n_angular must be even and >= 8"));
    }
    let hr = 1.0 / n_radial as f64;
    let ht = core::f64::consts::TAU / n_angular as f64;
    let mut nodes = Vec::with_capacity(n_radial * n_angular);
    let mut weights = Vec::with_capacity(n_radial * n_angular);
    let mut interior = Vec::with_capacity(n_radial * n_angular);
    for j in 0..n_radial {
        let r = (j as f64 + 0.5) * hr;
        for k in 0..n_angular {
            let t = k as f64 * ht;
            nodes.push(C64::from_polar(r, t));
            weights.push(r * hr * ht);
            interior.push(j + 1 < n_radial);
        }
    }
    Ok(DiskGrid { n_radial, n_angular, nodes, weights, interior_mask: interior })
}

/// Area quadrature sum f(z_k) w_k over the disk grid.
pub fn quad_disk(grid: &DiskGrid, f: &[C64]) -> Result<C64> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument("quad_disk: field length mismatch"));
    }
    if !crate::num::all_finite(f) {
        return Err(Error::NonFinite("quad_disk"));
    }
    Ok(ksum(f.iter().zip(&grid.weights).map(|(v, &w)| v * w)))
}

/// Equispaced nodes on the unit circle; the trapezoidal rule here is
/// spectrally accurate for smooth periodic integrands.
#[derive(Debug, Clone)]
pub struct BoundaryRing {
    pub n_points: usize,
    pub points: Vec<C64>,
    pub arc_weight: f64,
}

impl BoundaryRing {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::InvalidArgument("BoundaryRing: n_points must be a power of two >= 8"));
        }
        let points = (0..n_points)
            .map(|k| C64::from_polar(1.0, core::f64::consts::TAU * k as f64 / n_points as f64))
            .collect();
        Ok(BoundaryRing { n_points, points, arc_weight: core::f64::consts::TAU / n_points as f64 })
    }

    pub fn theta(&self, k: usize) -> f64 {
        core::f64::consts::TAU * k as f64 / self.n_points as f64
    }

    pub fn sample(&self, f: impl Fn(C64) -> C64) -> Vec<C64> {
        self.points.iter().map(|&z| f(z)).collect()
    }
}

/// Contour quadrature (trapezoidal in arc length) over the boundary ring.
pub fn quad_boundary(ring: &BoundaryRing, f: &[C64]) -> Result<C64> {
    if f.len() != ring.n_points {
        return Err(Error::InvalidArgument("quad_boundary: field length mismatch"));
    }
    if !crate::num::all_finite(f) {
        return Err(Error::NonFinite("quad_boundary"));
    }
    Ok(ksum(f.iter().map(|&v| v)) * ring.arc_weight)
}

/// Uniform cell-centered grid on the square [-R, R]^2 in the lambda plane.
///
/// Cell centering keeps lambda = 0 off the grid and makes the node set
/// symmetric under both lambda -> -lambda and lambda -> conj(lambda).
#[derive(Debug, Clone)]
pub struct LambdaGrid {
    pub radius: f64,
    pub n: usize,
    pub spacing: f64,
    pub nodes: Vec<C64>,
}

impl LambdaGrid {
    pub fn new(radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("LambdaGrid: radius must be positive"));
        }
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidArgument("LambdaGrid: n must be even and >= 2"));
        }
        let spacing = 2.0 * radius / n as f64;
        let mut nodes = Vec::with_capacity(n * n);
        for j in 0..n {
            let re = -radius + (j as f64 + 0.5) * spacing;
            for k in 0..n {
                let im = -radius + (k as f64 + 0.5) * spacing;
                nodes.push(c64(re, im));
            }
        }
        Ok(LambdaGrid { radius, n, spacing, nodes })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Cell area for quadrature over the lambda plane.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    /// Index of the node at -lambda.
    pub fn neg_index(&self, idx: usize) -> usize {
        let (j, k) = (idx / self.n, idx % self.n);
        (self.n - 1 - j) * self.n + (self.n - 1 - k)
    }

    /// Index of the node at conj(lambda).
    pub fn conj_index(&self, idx: usize) -> usize {
        let (j, k) = (idx / self.n, idx % self.n);
        j * self.n + (self.n - 1 - k)
    }
}
