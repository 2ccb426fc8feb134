//! The scattering transform b(lambda) from boundary or interior data, and
//! the conjugate-linear Fredholm solve in the lambda plane recovering
//! mu(z, .) from b.
//!
//! Conventions: `lambda_bar b(lambda) = -(1/2 pi i) Int_{|z|=1} e^{lambda z
//! - conj(lambda z)} dbar_z mu`, which equals `(1/4 pi) Int e^{...} q mu`
//! (the two-form consistency invariant). The lambda-plane equation realizes
//! `d mu / d lambda_bar = b e mu_bar` through the Cauchy transform
//!
//! ```text
//! mu(z, lambda) = 1 + (1/pi) Int b(l') e^{conj(l' z) - l' z} conj(mu(z, l'))
//!                 / (lambda - l') dA(l').
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::cgo::{solve_boundary_equation, BoundaryTrace, CgoConfig, CgoField};
use crate::dtn::{fourier_coeffs_from_samples, DbarTraceOperator};
use crate::mesh::{BoundaryRing, DiskGrid, LambdaGrid};
use crate::num::{c64, C64, I};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterForm {
    BoundaryForm,
    InteriorForm,
}

/// Samples of b over a lambda grid with the exceptional-node mask.
#[derive(Debug, Clone)]
pub struct ScatteringGrid {
    pub lgrid: LambdaGrid,
    pub b: Vec<C64>,
    pub exceptional_mask: Vec<bool>,
    pub method: ScatterForm,
}

impl ScatteringGrid {
    pub fn masked_count(&self) -> usize {
        self.exceptional_mask.iter().filter(|&&m| m).count()
    }
}

/// b(lambda) from the boundary form: the dbar trace of psi is pushed to a
/// trace of mu by the e^{-lambda z} factor and integrated over the circle.
pub fn scattering_boundary(
    ring: &BoundaryRing,
    trace: &BoundaryTrace,
    phi: &DbarTraceOperator,
    lambda: C64,
) -> Result<C64> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidArgument("scattering_boundary: lambda = 0"));
    }
    let n = ring.n_points;
    let nm = phi.n_modes;
    let coeffs = fourier_coeffs_from_samples(&trace.psi_b, nm);
    let chi = phi.apply(&coeffs);
    // contour integral of e^{-conj(lambda) zbar} (dbar mu component) dzbar
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let z = ring.points[k];
        let t = ring.theta(k);
        let mut chi_s = C64::new(0.0, 0.0);
        for (ci, cv) in chi.iter().enumerate() {
            let m = ci as isize - nm as isize;
            chi_s += cv * C64::from_polar(1.0, m as f64 * t);
        }
        let dmu = (-(lambda * z)).exp() * chi_s; // dbar mu = e^{-lambda z} dbar psi
        let dzbar = -I * z.conj() * ring.arc_weight;
        acc += (-(lambda.conj() * z.conj())).exp() * dmu * dzbar;
    }
    Ok(-acc / (core::f64::consts::TAU * I * lambda.conj()))
}

/// b(lambda) from the interior form: area quadrature of e^{lambda z -
/// conj(lambda z)} q mu / (4 pi lambda_bar).
pub fn scattering_interior(
    grid: &DiskGrid,
    q: &[f64],
    field: &CgoField,
    lambda: C64,
) -> Result<C64> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidArgument("scattering_interior: lambda = 0"));
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..grid.len() {
        if q[i] != 0.0 {
            let z = grid.nodes[i];
            let e = (lambda * z - (lambda * z).conj()).exp();
            acc += e * q[i] * field.mu[i] * grid.weights[i];
        }
    }
    // (1/4pi) against q = 4 Q dxdy, divided by lambda_bar
    Ok(acc / (core::f64::consts::PI * lambda.conj()))
}

/// Assemble b over a lambda grid from DtN data alone (boundary route).
/// Exceptional nodes are masked with b = 0 and recorded; nothing downstream
/// reads a masked value.
pub fn scattering_grid_boundary(
    ring: &BoundaryRing,
    phi: &DbarTraceOperator,
    phi0: &DbarTraceOperator,
    lgrid: &LambdaGrid,
    cfg: &CgoConfig,
) -> ScatteringGrid {
    let mut b = vec![C64::new(0.0, 0.0); lgrid.len()];
    let mut mask = vec![false; lgrid.len()];
    for (i, &lambda) in lgrid.nodes.iter().enumerate() {
        match solve_boundary_equation(ring, phi, phi0, lambda, cfg)
            .and_then(|tr| scattering_boundary(ring, &tr, phi, lambda))
        {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => b[i] = v,
            _ => mask[i] = true,
        }
    }
    ScatteringGrid {
        lgrid: lgrid.clone(),
        b,
        exceptional_mask: mask,
        method: ScatterForm::BoundaryForm,
    }
}

/// Result of the lambda-plane solve at one interior point z.
#[derive(Debug, Clone)]
pub struct DbarSolution {
    pub z: C64,
    pub mu: Vec<C64>,
    pub residual: f64,
}

fn cauchy_apply(lgrid: &LambdaGrid, f: &[C64], out: &mut [C64]) {
    let area = lgrid.cell_area();
    let zero = C64::new(0.0, 0.0);
    for (i, o) in out.iter_mut().enumerate() {
        let li = lgrid.nodes[i];
        let mut s = C64::new(0.0, 0.0);
        for (j, &fj) in f.iter().enumerate() {
            if j != i && fj != zero {
                s += fj / (li - lgrid.nodes[j]);
            }
        }
        // the singular cell integrates to zero by symmetry (PV)
        *o = s * (area / core::f64::consts::PI);
    }
}

/// Solve the conjugate-linear lambda-plane equation at a fixed interior z:
/// fixed-point iteration on `mu = 1 + C[a . conj(mu)]`, falling back to the
/// doubled real-linear dense system when the iteration stalls (the equation
/// involves conj(mu), so complex-linear solvers do not apply as-is).
pub fn solve_dbar_lambda(sgrid: &ScatteringGrid, z: C64, cfg: &CgoConfig) -> Result<DbarSolution> {
    let lgrid = &sgrid.lgrid;
    let n = lgrid.len();
    // a(l') = b(l') e^{conj(l' z) - l' z}, zero on masked nodes
    let a: Vec<C64> = (0..n)
        .map(|j| {
            if sgrid.exceptional_mask[j] {
                C64::new(0.0, 0.0)
            } else {
                let lz = lgrid.nodes[j] * z;
                sgrid.b[j] * (lz.conj() - lz).exp()
            }
        })
        .collect();
    let mut mu = vec![c64(1.0, 0.0); n];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut prod = vec![C64::new(0.0, 0.0); n];
    let mut converged = false;
    let mut last = f64::INFINITY;
    let mut bad = 0;
    for _ in 0..cfg.max_iter {
        for j in 0..n {
            prod[j] = a[j] * mu[j].conj();
        }
        cauchy_apply(lgrid, &prod, &mut tmp);
        let mut change = 0.0f64;
        for j in 0..n {
            let next = 1.0 + tmp[j];
            change += (next - mu[j]).norm_sqr();
            mu[j] = next;
        }
        change = libm::sqrt(change / n as f64);
        if change < cfg.tol {
            converged = true;
            break;
        }
        if change > last {
            bad += 1;
            if bad >= 4 {
                break;
            }
        } else {
            bad = 0;
        }
        last = change;
    }
    if !converged {
        // doubled real-linear dense solve: unknowns (Re mu, Im mu)
        let dim = 2 * n;
        let mut m = crate::linalg::CMat::zeros(dim, dim);
        let mut basis = vec![C64::new(0.0, 0.0); n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        for part in 0..2 {
            for jj in 0..n {
                for v in basis.iter_mut() {
                    *v = C64::new(0.0, 0.0);
                }
                basis[jj] = if part == 0 { c64(1.0, 0.0) } else { c64(0.0, 1.0) };
                for j in 0..n {
                    prod[j] = a[j] * basis[j].conj();
                }
                cauchy_apply(lgrid, &prod, &mut col);
                for i in 0..n {
                    let v = basis[i] - col[i];
                    let cidx = part * n + jj;
                    m.set(i, cidx, c64(v.re, 0.0));
                    m.set(n + i, cidx, c64(v.im, 0.0));
                }
            }
        }
        let rhs: Vec<C64> =
            (0..dim).map(|i| if i < n { c64(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
        let f = crate::linalg::clu_factor(&m)
            .map_err(|_| Error::SolveFailure { what: "dbar dense fallback", diagnostic: z.norm() })?;
        let x = f.solve(&rhs);
        for j in 0..n {
            mu[j] = c64(x[j].re, x[n + j].re);
        }
    }
    // independent residual
    for j in 0..n {
        prod[j] = a[j] * mu[j].conj();
    }
    cauchy_apply(lgrid, &prod, &mut tmp);
    let mut rnum = 0.0;
    for j in 0..n {
        rnum += (mu[j] - 1.0 - tmp[j]).norm_sqr();
    }
    let residual = libm::sqrt(rnum / n as f64);
    if !residual.is_finite() || residual > 1e-5 {
        return Err(Error::SolveFailure { what: "dbar lambda solve", diagnostic: residual });
    }
    Ok(DbarSolution { z, mu, residual })
}

/// Finite-difference residual of the lambda-plane dbar equation: compares
/// d mu / d lambda_bar against b e mu_bar on interior grid nodes; returns
/// the relative l2 mismatch (quadrature-tolerance scale).
pub fn dbar_equation_residual(sgrid: &ScatteringGrid, sol: &DbarSolution) -> f64 {
    let lgrid = &sgrid.lgrid;
    let n = lgrid.n;
    let h = lgrid.spacing;
    let mut num = 0.0;
    let mut den = 0.0;
    for jr in 1..n - 1 {
        for ji in 1..n - 1 {
            let idx = jr * n + ji;
            if sgrid.exceptional_mask[idx] {
                continue;
            }
            let mu_xp = sol.mu[(jr + 1) * n + ji];
            let mu_xm = sol.mu[(jr - 1) * n + ji];
            let mu_yp = sol.mu[jr * n + ji + 1];
            let mu_ym = sol.mu[jr * n + ji - 1];
            let dx = (mu_xp - mu_xm) / (2.0 * h);
            let dy = (mu_yp - mu_ym) / (2.0 * h);
            let dlbar = (dx + I * dy) / 2.0;
            let lz = lgrid.nodes[idx] * sol.z;
            let rhs = sgrid.b[idx] * (lz.conj() - lz).exp() * sol.mu[idx].conj();
            num += (dlbar - rhs).norm_sqr();
            den += rhs.norm_sqr();
        }
    }
    if den == 0.0 {
        return 0.0;
    }
    libm::sqrt(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgo::{q_from_sigma, solve_lippmann_schwinger, CgoConfig};
    use crate::dtn::{assemble_dtn, dbar_trace, Conductivity};
    use crate::mesh::build_disk_grid;
    use crate::phantom::Phantom;

    struct Setup {
        grid: DiskGrid,
        ring: BoundaryRing,
        cond: Conductivity,
        q: Vec<f64>,
        phi: DbarTraceOperator,
        phi0: DbarTraceOperator,
    }

    fn setup(contrast: f64) -> Setup {
        let grid = build_disk_grid(48, 96).unwrap();
        let ring = BoundaryRing::new(128).unwrap();
        let p = Phantom::radial(0.42, contrast);
        let cond = p.conductivity(&grid).unwrap();
        let dtn = assemble_dtn(&grid, &cond, 14).unwrap();
        let refop = assemble_dtn(&grid, &Conductivity::uniform(&grid), 14).unwrap();
        let (phi, phi0) = dbar_trace(&dtn, &refop).unwrap();
        let q = q_from_sigma(&grid, &cond).unwrap();
        Setup { grid, ring, cond, q, phi, phi0 }
    }

    #[test]
    fn unit_sigma_scatters_to_zero() {
        let grid = build_disk_grid(24, 48).unwrap();
        let ring = BoundaryRing::new(64).unwrap();
        let refop = assemble_dtn(&grid, &Conductivity::uniform(&grid), 8).unwrap();
        let (phi, phi0) = dbar_trace(&refop, &refop).unwrap();
        let lambda = c64(1.0, 0.8);
        let tr =
            solve_boundary_equation(&ring, &phi, &phi0, lambda, &CgoConfig::default()).unwrap();
        let b = scattering_boundary(&ring, &tr, &phi, lambda).unwrap();
        assert!(b.norm() < 1e-12, "b = {b}");
        // interior form agrees trivially
        let cond = Conductivity::uniform(&grid);
        let q = q_from_sigma(&grid, &cond).unwrap();
        let f = solve_lippmann_schwinger(&grid, &cond, lambda, &CgoConfig::default()).unwrap();
        let bi = scattering_interior(&grid, &q, &f, lambda).unwrap();
        assert_eq!(bi, C64::new(0.0, 0.0));
        // lambda = 0 rejected
        assert!(scattering_boundary(&ring, &tr, &phi, C64::new(0.0, 0.0)).is_err());
    }

    /// interior-form b with two-grid Richardson refinement of the O(h^2)
    /// quadrature error (the boundary form is spectrally accurate, so the
    /// interior side carries the refinement)
    fn interior_b_refined(p: &Phantom, lambda: C64, cfg: &CgoConfig) -> C64 {
        let mut vals = [C64::new(0.0, 0.0); 2];
        let sizes = [48usize, 64];
        for (i, &nr) in sizes.iter().enumerate() {
            let grid = build_disk_grid(nr, 2 * nr).unwrap();
            let cond = p.conductivity(&grid).unwrap();
            let q = q_from_sigma(&grid, &cond).unwrap();
            let f = solve_lippmann_schwinger(&grid, &cond, lambda, cfg).unwrap();
            vals[i] = scattering_interior(&grid, &q, &f, lambda).unwrap();
        }
        let ratio = (sizes[1] as f64 / sizes[0] as f64).powi(2);
        vals[1] + (vals[1] - vals[0]) / (ratio - 1.0)
    }

    #[test]
    fn boundary_and_interior_forms_agree() {
        let s = setup(1.3);
        let p = Phantom::radial(0.42, 1.3);
        let cfg = CgoConfig::default();
        for &lambda in &[c64(1.1, 0.3), c64(-0.7, 1.4), c64(2.2, -0.8)] {
            let tr = solve_boundary_equation(&s.ring, &s.phi, &s.phi0, lambda, &cfg).unwrap();
            let bb = scattering_boundary(&s.ring, &tr, &s.phi, lambda).unwrap();
            let bi = interior_b_refined(&p, lambda, &cfg);
            let rel = (bb - bi).norm() / bi.norm();
            assert!(rel <= 1e-2, "lambda={lambda}: boundary {bb} vs interior {bi} rel {rel}");
        }
    }

    #[test]
    fn radial_phantom_scattering_modulus_flat_on_circles() {
        let s = setup(1.3);
        let cfg = CgoConfig::default();
        let mut vals = alloc::vec::Vec::new();
        for k in 0..8 {
            let lambda = C64::from_polar(2.0, core::f64::consts::TAU * k as f64 / 8.0 + 0.05);
            let tr = solve_boundary_equation(&s.ring, &s.phi, &s.phi0, lambda, &cfg).unwrap();
            vals.push(scattering_boundary(&s.ring, &tr, &s.phi, lambda).unwrap().norm());
        }
        let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd: f64 = libm::sqrt(
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64,
        );
        assert!(sd <= 0.05 * mean, "relative spread {} over circle", sd / mean);
    }

    #[test]
    fn born_level_scattering_matches_direct_quadrature() {
        let grid = build_disk_grid(48, 96).unwrap();
        let p = Phantom::radial(0.42, 1.05);
        let cond = p.conductivity(&grid).unwrap();
        let q = q_from_sigma(&grid, &cond).unwrap();
        let lambda = c64(1.4, 0.6);
        let f = solve_lippmann_schwinger(&grid, &cond, lambda, &CgoConfig::default()).unwrap();
        let b = scattering_interior(&grid, &q, &f, lambda).unwrap();
        // born: mu == 1 in the integrand
        let mut born = C64::new(0.0, 0.0);
        for i in 0..grid.len() {
            if q[i] != 0.0 {
                let z = grid.nodes[i];
                born += (lambda * z - (lambda * z).conj()).exp() * q[i] * grid.weights[i];
            }
        }
        born /= core::f64::consts::PI * lambda.conj();
        // the gap is O(contrast - 1) relative to born, which is itself
        // O(contrast - 1): second order overall
        assert!((b - born).norm() <= 2.0 * 0.05 * born.norm(), "b {b} vs born {born}");
    }

    #[test]
    fn dbar_solve_identity_for_zero_scattering() {
        let lgrid = LambdaGrid::new(4.0, 8).unwrap();
        let sgrid = ScatteringGrid {
            lgrid: lgrid.clone(),
            b: vec![C64::new(0.0, 0.0); lgrid.len()],
            exceptional_mask: vec![false; lgrid.len()],
            method: ScatterForm::InteriorForm,
        };
        let sol = solve_dbar_lambda(&sgrid, c64(0.3, 0.1), &CgoConfig::default()).unwrap();
        assert!(sol.mu.iter().all(|m| (m - c64(1.0, 0.0)).norm() < 1e-14));
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn dbar_solve_born_regime_matches_one_shot_cauchy() {
        let lgrid = LambdaGrid::new(4.0, 12).unwrap();
        // small synthetic smooth b
        let b: Vec<C64> = lgrid
            .nodes
            .iter()
            .map(|&l| 0.02 * libm::exp(-l.norm_sqr() / 2.0) * c64(1.0, 0.4))
            .collect();
        let sgrid = ScatteringGrid {
            lgrid: lgrid.clone(),
            b,
            exceptional_mask: vec![false; lgrid.len()],
            method: ScatterForm::InteriorForm,
        };
        let z = c64(0.25, -0.4);
        let sol = solve_dbar_lambda(&sgrid, z, &CgoConfig::default()).unwrap();
        // one-shot: mu ~ 1 + C[a]
        let n = lgrid.len();
        let a: Vec<C64> = (0..n)
            .map(|j| {
                let lz = lgrid.nodes[j] * z;
                sgrid.b[j] * (lz.conj() - lz).exp()
            })
            .collect();
        let mut one = vec![C64::new(0.0, 0.0); n];
        cauchy_apply(&lgrid, &a, &mut one);
        let mut worst = 0.0f64;
        let mut dev = 0.0f64;
        for j in 0..n {
            worst = worst.max((sol.mu[j] - 1.0 - one[j]).norm());
            dev = dev.max(one[j].norm());
        }
        assert!(worst <= 0.05 * dev, "second-order gap {worst} vs first-order {dev}");
    }

    #[test]
    fn dbar_solve_conjugate_linearity_exact() {
        let lgrid = LambdaGrid::new(3.0, 10).unwrap();
        let mut rng = crate::num::Rng::new(12);
        let b: Vec<C64> = lgrid
            .nodes
            .iter()
            .map(|&l| {
                0.05 * libm::exp(-l.norm_sqr()) * c64(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))
            })
            .collect();
        // conjugated data on the conjugated grid indices
        let bc: Vec<C64> = (0..lgrid.len()).map(|i| b[lgrid.conj_index(i)].conj()).collect();
        let mk = |bv: Vec<C64>| ScatteringGrid {
            lgrid: lgrid.clone(),
            b: bv,
            exceptional_mask: vec![false; lgrid.len()],
            method: ScatterForm::InteriorForm,
        };
        let z = c64(0.4, 0.2);
        let s1 = solve_dbar_lambda(&mk(b), z, &CgoConfig::default()).unwrap();
        let s2 = solve_dbar_lambda(&mk(bc), z.conj(), &CgoConfig::default()).unwrap();
        let mut worst = 0.0f64;
        for i in 0..lgrid.len() {
            worst = worst.max((s2.mu[lgrid.conj_index(i)] - s1.mu[i].conj()).norm());
        }
        assert!(worst < 1e-13, "conjugation defect {worst}");
    }

    #[test]
    fn masked_nodes_carry_no_weight() {
        let lgrid = LambdaGrid::new(3.0, 8).unwrap();
        let mut b = vec![C64::new(0.0, 0.0); lgrid.len()];
        let mut mask = vec![false; lgrid.len()];
        b[5] = c64(1e6, 0.0); // absurd value behind the mask
        mask[5] = true;
        let sgrid =
            ScatteringGrid { lgrid, b, exceptional_mask: mask, method: ScatterForm::BoundaryForm };
        let sol = solve_dbar_lambda(&sgrid, c64(0.1, 0.0), &CgoConfig::default()).unwrap();
        assert!(sol.mu.iter().all(|m| (m - c64(1.0, 0.0)).norm() < 1e-14));
        assert_eq!(sgrid.masked_count(), 1);
    }
}
