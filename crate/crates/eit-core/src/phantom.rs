//! Synthetic conductivity phantoms: smooth bump profiles with flat tails,
//! C^2 by construction, equal to 1 outside their support. The polynomial
//! bump carries a closed-form Schroedinger potential used as the symbolic
//! oracle for the finite-difference potential extraction.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dtn::Conductivity;
use crate::mesh::DiskGrid;
use crate::num::C64;
use crate::{Error, Result};

/// C^2 bump profile (1 - s^2)^3 on s < 1, zero outside.
#[inline]
pub fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let t = 1.0 - s * s;
        t * t * t
    }
}

fn bump_d1(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let t = 1.0 - s * s;
        -6.0 * s * t * t
    }
}

fn bump_d2(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        let t = 1.0 - s * s;
        -6.0 * t * t + 24.0 * s * s * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    RadialBump,
    OffsetBump,
    TwoBumps,
    PolynomialBump,
}

/// A phantom: bump centers, radii and the peak conductivity value.
#[derive(Debug, Clone)]
pub struct Phantom {
    pub kind: PhantomKind,
    pub centers: Vec<C64>,
    pub radii: Vec<f64>,
    /// peak value of sigma (sigma = contrast at the bump center)
    pub contrast: f64,
}

impl Phantom {
    pub fn radial(radius: f64, contrast: f64) -> Self {
        Phantom {
            kind: PhantomKind::RadialBump,
            centers: alloc::vec![C64::new(0.0, 0.0)],
            radii: alloc::vec![radius],
            contrast,
        }
    }

    pub fn offset(center: C64, radius: f64, contrast: f64) -> Self {
        Phantom {
            kind: PhantomKind::OffsetBump,
            centers: alloc::vec![center],
            radii: alloc::vec![radius],
            contrast,
        }
    }

    pub fn two_bumps(c1: C64, r1: f64, c2: C64, r2: f64, contrast: f64) -> Self {
        Phantom {
            kind: PhantomKind::TwoBumps,
            centers: alloc::vec![c1, c2],
            radii: alloc::vec![r1, r2],
            contrast,
        }
    }

    pub fn polynomial(center: C64, radius: f64, contrast: f64) -> Self {
        Phantom {
            kind: PhantomKind::PolynomialBump,
            centers: alloc::vec![center],
            radii: alloc::vec![radius],
            contrast,
        }
    }

    /// amplitude of the sqrt(sigma) bump for the polynomial kind
    fn beta(&self) -> f64 {
        libm::sqrt(self.contrast) - 1.0
    }

    pub fn validate(&self, collar: f64) -> Result<()> {
        if !(self.contrast > 0.0) {
            return Err(Error::InvalidArgument("phantom: contrast must be positive"));
        }
        if self.centers.len() != self.radii.len() || self.centers.is_empty() {
            return Err(Error::InvalidArgument("phantom: centers/radii mismatch"));
        }
        for (&c, &r) in self.centers.iter().zip(&self.radii) {
            if !(r > 0.0) || c.norm() + r >= collar {
                return Err(Error::InvalidArgument("phantom: support must stay inside the collar"));
            }
        }
        if self.kind == PhantomKind::TwoBumps {
            let d = (self.centers[0] - self.centers[1]).norm();
            if d < self.radii[0] + self.radii[1] {
                return Err(Error::InvalidArgument("phantom: two_bumps supports overlap"));
            }
        }
        Ok(())
    }

    /// Pointwise conductivity value.
    pub fn sigma(&self, z: C64) -> f64 {
        match self.kind {
            PhantomKind::PolynomialBump => {
                let s = (z - self.centers[0]).norm() / self.radii[0];
                let root = 1.0 + self.beta() * bump(s);
                root * root
            }
            _ => {
                let mut v = 1.0;
                for (&c, &r) in self.centers.iter().zip(&self.radii) {
                    v += (self.contrast - 1.0) * bump((z - c).norm() / r);
                }
                v
            }
        }
    }

    /// Closed-form potential density Q with q = Q * dd^c|z|^2, available for
    /// the polynomial bump (where sqrt(sigma) has hand-differentiable form).
    pub fn q_closed_form(&self, z: C64) -> Option<f64> {
        if self.kind != PhantomKind::PolynomialBump {
            return None;
        }
        let rho = self.radii[0];
        let s = (z - self.centers[0]).norm() / rho;
        if s >= 1.0 {
            return Some(0.0);
        }
        let beta = self.beta();
        // laplacian of sqrt(sigma) = beta (B'' + B'/s) / rho^2, with the
        // s -> 0 limit B'(s)/s -> B''(0)
        let rad = if s < 1e-9 { 2.0 * bump_d2(0.0) } else { bump_d2(s) + bump_d1(s) / s };
        let lap = beta * rad / (rho * rho);
        Some(lap / (4.0 * (1.0 + beta * bump(s))))
    }

    /// Sample onto a grid as a Conductivity, with the collar tight around
    /// the support.
    pub fn conductivity(&self, grid: &DiskGrid) -> Result<Conductivity> {
        let support = self
            .centers
            .iter()
            .zip(&self.radii)
            .map(|(c, r)| c.norm() + r)
            .fold(0.0f64, f64::max);
        let collar = (support + 0.02).min(0.97);
        self.validate(collar + 1e-9)?;
        let mut cond = Conductivity::from_fn(grid, collar, |z| self.sigma(z))?;
        cond.smoothness_tag = String::from("C2 bump phantom");
        Ok(cond)
    }
}
