//! Complex geometrical optics solutions: the interior integral equation for
//! mu(z, lambda) driven by the potential q = dd^c sqrt(sigma)/sqrt(sigma),
//! and the boundary Fredholm equation recovering psi|_{r=1} from
//! Dirichlet-to-Neumann data alone.

use alloc::vec;
use alloc::vec::Vec;

use crate::dtn::{fourier_coeffs_from_samples, Conductivity, DbarTraceOperator};
use crate::faddeev::faddeev_g_fast;
use crate::linalg::{clu_factor, cond_estimate_1, gmres, CMat};
use crate::mesh::{BoundaryRing, DiskGrid};
use crate::num::{c64, C64, I};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgoSource {
    InteriorLs,
    BoundaryEq,
    DbarEq,
}

/// Interior CGO field mu(., lambda) = psi e^{-lambda z} on the disk grid.
#[derive(Debug, Clone)]
pub struct CgoField {
    pub lambda: C64,
    pub mu: Vec<C64>,
    pub source: CgoSource,
    /// true discrete residual of the solved system
    pub residual: f64,
}

/// Boundary values psi|_{r=1} on the ring, with solve diagnostics.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub lambda: C64,
    pub psi_b: Vec<C64>,
    pub c_residual: f64,
    pub condition: f64,
}

/// Potential density Q with q = Q * dd^c|z|^2 = 4 Q dx dy, by central
/// differences of sqrt(sigma) on the polar grid. Q is identically zero on
/// the collar where sigma is 1.
pub fn q_from_sigma(grid: &DiskGrid, cond: &Conductivity) -> Result<Vec<f64>> {
    cond.validate(grid)?;
    let (nr, nt) = (grid.n_radial, grid.n_angular);
    let hr = 1.0 / nr as f64;
    let ht = core::f64::consts::TAU / nt as f64;
    let s: Vec<f64> = cond.sigma.iter().map(|&v| libm::sqrt(v)).collect();
    let mut q = vec![0.0; nr * nt];
    for j in 0..nr {
        let r = grid.radius(j);
        for k in 0..nt {
            let idx = j * nt + k;
            if grid.nodes[idx].norm() > cond.boundary_collar {
                continue; // sigma == 1: q = 0 exactly
            }
            let sc = s[idx];
            let sp = if j + 1 < nr { s[(j + 1) * nt + k] } else { 1.0 };
            // inward neighbour crosses the axis onto the opposite ray
            let sm = if j > 0 { s[(j - 1) * nt + k] } else { s[(k + nt / 2) % nt] };
            let st_p = s[j * nt + (k + 1) % nt];
            let st_m = s[j * nt + (k + nt - 1) % nt];
            // radial first derivative: the 1/r weight amplifies stencil
            // error near the axis, so use a third-order 4-point fit there
            let sr = if j + 2 < nr {
                let spp = s[(j + 2) * nt + k];
                (-2.0 * sm - 3.0 * sc + 6.0 * sp - spp) / (6.0 * hr)
            } else {
                (sp - sm) / (2.0 * hr)
            };
            let lap = (sp - 2.0 * sc + sm) / (hr * hr)
                + sr / r
                + (st_p - 2.0 * sc + st_m) / (r * r * ht * ht);
            q[idx] = lap / (4.0 * sc);
        }
    }
    Ok(q)
}

/// Configuration of the dense CGO solvers.
#[derive(Debug, Clone)]
pub struct CgoConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// cap on the number of support nodes for the dense interior system
    pub max_dense: usize,
    /// condition estimate beyond which lambda is flagged exceptional
    pub exceptional_cond: f64,
    /// evaluate mu on the whole grid (not just the potential support)
    pub extend: bool,
}

impl Default for CgoConfig {
    fn default() -> Self {
        CgoConfig { tol: 1e-10, max_iter: 300, max_dense: 3600, exceptional_cond: 1e8, extend: true }
    }
}

/// Average of the kernel over the quadrature cell around a support node,
/// taming the logarithmic diagonal of the interior system.
fn cell_averaged_kernel(grid: &DiskGrid, idx: usize, lambda: C64) -> C64 {
    let nt = grid.n_angular;
    let j = idx / nt;
    let r = grid.radius(j);
    let hr = 1.0 / grid.n_radial as f64;
    let ht = core::f64::consts::TAU / nt as f64;
    let t = (idx % nt) as f64 * ht;
    let z0 = grid.nodes[idx];
    let sub = 8;
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..sub {
        for b in 0..sub {
            let rr = r + (-0.5 + (a as f64 + 0.5) / sub as f64) * hr;
            let tt = t + (-0.5 + (b as f64 + 0.5) / sub as f64) * ht;
            let zz = C64::from_polar(rr, tt);
            acc += faddeev_g_fast(z0 - zz, lambda);
        }
    }
    acc / (sub * sub) as f64
}

struct InteriorSystem {
    support: Vec<usize>,
    k: CMat,
}

fn build_interior_system(
    grid: &DiskGrid,
    q: &[f64],
    lambda: C64,
    cfg: &CgoConfig,
) -> Result<InteriorSystem> {
    let support: Vec<usize> = (0..grid.len()).filter(|&i| q[i] != 0.0).collect();
    let ns = support.len();
    if ns > cfg.max_dense {
        return Err(Error::InvalidArgument("lippmann-schwinger: support exceeds dense budget"));
    }
    let mut k = CMat::zeros(ns, ns);
    for (a, &ia) in support.iter().enumerate() {
        let za = grid.nodes[ia];
        for (b, &ib) in support.iter().enumerate() {
            let gv = if ia == ib {
                cell_averaged_kernel(grid, ia, lambda)
            } else {
                faddeev_g_fast(za - grid.nodes[ib], lambda)
            };
            k.set(a, b, 2.0 * I * gv * (q[ib] * grid.weights[ib]));
        }
    }
    Ok(InteriorSystem { support, k })
}

/// Solve the interior integral equation
///
/// ```text
/// mu(z) = 1 + (i/2) Int g(z - xi, lambda) mu(xi) q(xi)
///       = 1 + 2i Sum_xi g(z - xi, lambda) Q(xi) mu(xi) w_xi
/// ```
///
/// restricted to the support of Q, then extended to the whole grid by the
/// same representation. Fixed-point iteration with a GMRES fallback; the
/// reported residual is re-verified by an independent matrix apply.
pub fn solve_lippmann_schwinger(
    grid: &DiskGrid,
    cond: &Conductivity,
    lambda: C64,
    cfg: &CgoConfig,
) -> Result<CgoField> {
    let q = q_from_sigma(grid, cond)?;
    let sys = build_interior_system(grid, &q, lambda, cfg)?;
    let ns = sys.support.len();
    if ns == 0 {
        // sigma == 1: the integral term vanishes identically
        return Ok(CgoField {
            lambda,
            mu: vec![c64(1.0, 0.0); grid.len()],
            source: CgoSource::InteriorLs,
            residual: 0.0,
        });
    }
    let ones = vec![c64(1.0, 0.0); ns];
    let mut mu_s = ones.clone();
    let mut last_change = f64::INFINITY;
    let mut diverging = 0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let knext = sys.k.matvec(&mu_s);
        let next: Vec<C64> = knext.iter().map(|v| v + 1.0).collect();
        let change = crate::num::rel_l2(&next, &mu_s);
        mu_s = next;
        if change < cfg.tol {
            converged = true;
            break;
        }
        if change > last_change {
            diverging += 1;
            if diverging >= 3 {
                break;
            }
        } else {
            diverging = 0;
        }
        last_change = change;
    }
    if !converged {
        // (I - K) mu = 1 by GMRES on the stored dense operator
        let apply = |x: &[C64]| -> Vec<C64> {
            let kx = sys.k.matvec(x);
            x.iter().zip(&kx).map(|(a, b)| a - b).collect()
        };
        let (sol, res, _) = gmres(apply, &ones, Some(&mu_s), 60, 8, cfg.tol);
        if res > 1e-6 {
            return Err(Error::ExceptionalLambda { lambda, condition: 1.0 / res });
        }
        mu_s = sol;
    }
    // independent residual verification
    let kmu = sys.k.matvec(&mu_s);
    let mut rnum = 0.0f64;
    for i in 0..ns {
        rnum += (mu_s[i] - kmu[i] - 1.0).norm_sqr();
    }
    let residual = libm::sqrt(rnum / ns as f64);
    // extend to all grid nodes via the representation (skippable when only
    // the support values feed the downstream quadrature)
    let mut mu = vec![c64(1.0, 0.0); grid.len()];
    if cfg.extend {
        for (b, &ib) in sys.support.iter().enumerate() {
            let src = 2.0 * I * (q[ib] * grid.weights[ib]) * mu_s[b];
            let zb = grid.nodes[ib];
            for (i, m) in mu.iter_mut().enumerate() {
                if q[i] != 0.0 {
                    continue; // support nodes are overwritten below
                }
                *m += faddeev_g_fast(grid.nodes[i] - zb, lambda) * src;
            }
        }
    }
    for (b, &ib) in sys.support.iter().enumerate() {
        mu[ib] = mu_s[b];
    }
    Ok(CgoField { lambda, mu, source: CgoSource::InteriorLs, residual })
}

/// Evaluate the interior representation psi(z) = e^{lambda z} (1 + Int g Q mu)
/// at arbitrary points (used to compare interior and boundary solutions on
/// the ring).
pub fn ls_psi_at(
    grid: &DiskGrid,
    q: &[f64],
    field: &CgoField,
    points: &[C64],
) -> Vec<C64> {
    let lambda = field.lambda;
    points
        .iter()
        .map(|&z| {
            let mut s = c64(1.0, 0.0);
            for i in 0..grid.len() {
                if q[i] != 0.0 {
                    s += 2.0
                        * I
                        * faddeev_g_fast(z - grid.nodes[i], lambda)
                        * (q[i] * grid.weights[i])
                        * field.mu[i];
                }
            }
            (lambda * z).exp() * s
        })
        .collect()
}

/// Kress weights for the periodic logarithmic quadrature: with n equispaced
/// nodes, `Int_0^{2pi} ln(4 sin^2((t-s)/2)) f(s) ds ~ Sum_j R[(i-j) mod n] f(s_j)`,
/// exact for trigonometric polynomials below the Nyquist degree.
pub(crate) fn kress_log_weights(n: usize) -> Vec<f64> {
    let mut r = vec![0.0f64; n];
    let half = n / 2;
    for (k, rv) in r.iter_mut().enumerate() {
        let d = core::f64::consts::TAU * k as f64 / n as f64;
        let mut s = 0.0;
        for m in 1..half {
            s += libm::cos(m as f64 * d) / m as f64;
        }
        *rv = -(2.0 * core::f64::consts::TAU / n as f64) * s
            - (core::f64::consts::TAU / (n as f64 * half as f64)) * libm::cos(half as f64 * d);
    }
    r
}

/// Kernel weights of the boundary equation along one target row: the
/// contour element `e^{lambda (z - xi)} g(z - xi, lambda) dxi_bar` with the
/// logarithmic part split off exactly,
///
/// ```text
/// e^{lambda d} g(d, lambda) = A(s) - (i/2pi) ln(4 sin^2((t_i - s)/2)),
/// ```
///
/// A analytic (the e^{-x} inside g cancels the prefactor identically), so
/// the trapezoid handles A spectrally and the Kress rule the logarithm.
fn boundary_kernel_row(ring: &BoundaryRing, lambda: C64, i: usize, kress: &[f64]) -> Vec<C64> {
    let n = ring.n_points;
    let zi = ring.points[i];
    let ti = ring.theta(i);
    let w = ring.arc_weight;
    let log_coeff = -I / core::f64::consts::TAU; // -(i/2pi)
    (0..n)
        .map(|s| {
            let xs = ring.points[s];
            // pullback of dxi_bar on the ccw circle
            let dxibar = -I * xs.conj();
            let a = if lambda.norm() == 0.0 {
                // g(d, 0) is exactly the log kernel: no smooth remainder
                C64::new(0.0, 0.0)
            } else if s == i {
                -I / core::f64::consts::PI * (crate::num::EULER_GAMMA + libm::log(lambda.norm()))
            } else {
                let d = zi - xs;
                let smooth = ((lambda * d).exp()) * faddeev_g_fast(d, lambda);
                let sinh = 2.0 * libm::fabs(libm::sin(0.5 * (ti - ring.theta(s))));
                smooth - log_coeff * 2.0 * libm::log(sinh)
            };
            let rj = kress[(i + n - s) % n];
            (a * w + log_coeff * rj) * dxibar
        })
        .collect()
}

/// Solve the boundary Fredholm equation for psi|_{r=1},
///
/// ```text
/// psi(z) = e^{lambda z} - Int_{|xi|=1} e^{lambda(z-xi)} g(z-xi, lambda)
///          [(PhiHat - PhiHat0) psi](xi) dxi_bar,
/// ```
///
/// where the trace difference is applied spectrally through the assembled
/// DtN operators. The sign of the integral term belongs to the crate's
/// kernel normalization (g inverts the operator against +dx dy); it is
/// pinned by the interior-oracle consistency test below, which leaves no
/// freedom. Near-singular systems are flagged exceptional with the
/// condition estimate attached.
pub fn solve_boundary_equation(
    ring: &BoundaryRing,
    phi: &DbarTraceOperator,
    phi0: &DbarTraceOperator,
    lambda: C64,
    cfg: &CgoConfig,
) -> Result<BoundaryTrace> {
    let n = ring.n_points;
    let nm = phi.n_modes;
    if 2 * nm + 2 > n {
        return Err(Error::InvalidArgument("boundary equation: ring too coarse for the modes"));
    }
    // trace-difference operator in ring space: samples -> coeffs -> (phi -
    // phi0) -> samples
    let dim = 2 * nm + 1;
    let mut diff = CMat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            diff.set(r, c, phi.matrix.at(r, c) - phi0.matrix.at(r, c));
        }
    }
    // columns of T: response to the unit sample basis is assembled via FFT
    // on each basis vector; n is small so dense assembly is fine
    let mut t = CMat::zeros(n, n);
    for col in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[col] = c64(1.0, 0.0);
        let coeffs = fourier_coeffs_from_samples(&e, nm);
        let out = diff.matvec(&coeffs);
        for (row, v) in (0..n).map(|k| {
            let tk = ring.theta(k);
            let mut s = C64::new(0.0, 0.0);
            for (ci, cv) in out.iter().enumerate() {
                let m = ci as isize - nm as isize;
                let ang = m as f64 * tk;
                s += cv * c64(libm::cos(ang), libm::sin(ang));
            }
            (k, s)
        }) {
            t.set(row, col, v);
        }
    }
    // full system matrix A = I + K T
    let kress = kress_log_weights(n);
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        let krow = boundary_kernel_row(ring, lambda, i, &kress);
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..n {
                acc += krow[s] * t.at(s, j);
            }
            a.set(i, j, if i == j { c64(1.0, 0.0) + acc } else { acc });
        }
    }
    let rhs: Vec<C64> = ring.points.iter().map(|&z| (lambda * z).exp()).collect();
    let f = clu_factor(&a).map_err(|_| Error::ExceptionalLambda { lambda, condition: f64::INFINITY })?;
    let condition = cond_estimate_1(&a, &f);
    if condition > cfg.exceptional_cond {
        return Err(Error::ExceptionalLambda { lambda, condition });
    }
    let psi_b = f.solve(&rhs);
    let ax = a.matvec(&psi_b);
    let mut rnum = 0.0;
    let mut rden = 0.0;
    for i in 0..n {
        rnum += (ax[i] - rhs[i]).norm_sqr();
        rden += rhs[i].norm_sqr();
    }
    Ok(BoundaryTrace { lambda, psi_b, c_residual: libm::sqrt(rnum / rden), condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtn::{assemble_dtn, dbar_trace};
    use crate::mesh::build_disk_grid;
    use crate::num::{max_abs, rel_l2, Rng};
    use crate::phantom::Phantom;

    #[test]
    fn kress_weights_reproduce_log_moments() {
        // Int ln(4sin^2((t-s)/2)) ds = 0; against cos(ms) it gives -2pi/m
        let n = 64usize;
        let r = kress_log_weights(n);
        for (ti_idx, t) in [(0usize, 0.0f64), (5, core::f64::consts::TAU * 5.0 / 64.0)] {
            let sum_const: f64 = (0..n).map(|j| r[(ti_idx + n - j) % n]).sum();
            assert!(sum_const.abs() < 1e-12);
            for m in [1usize, 3, 7, 15] {
                let mut acc = 0.0;
                for j in 0..n {
                    let s = core::f64::consts::TAU * j as f64 / n as f64;
                    acc += r[(ti_idx + n - j) % n] * libm::cos(m as f64 * s);
                }
                let want = -core::f64::consts::TAU / m as f64 * libm::cos(m as f64 * t);
                assert!((acc - want).abs() < 1e-10, "m={m}: {acc} vs {want}");
            }
        }
    }

    #[test]
    fn q_of_unit_sigma_is_zero_and_collar_exact() {
        let g = build_disk_grid(32, 64).unwrap();
        let cond = Conductivity::uniform(&g);
        let q = q_from_sigma(&g, &cond).unwrap();
        assert!(q.iter().all(|&v| v == 0.0));
        let p = Phantom::radial(0.4, 1.5);
        let c2 = p.conductivity(&g).unwrap();
        let q2 = q_from_sigma(&g, &c2).unwrap();
        for (i, &z) in g.nodes.iter().enumerate() {
            if z.norm() > c2.boundary_collar {
                assert_eq!(q2[i], 0.0);
            }
        }
        assert!(q2.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn unit_sigma_gives_unit_mu() {
        let g = build_disk_grid(24, 48).unwrap();
        let cond = Conductivity::uniform(&g);
        let f = solve_lippmann_schwinger(&g, &cond, c64(1.0, 2.0), &CgoConfig::default()).unwrap();
        assert!(f.mu.iter().all(|m| (m - c64(1.0, 0.0)).norm() < 1e-14));
        assert_eq!(f.residual, 0.0);
    }

    #[test]
    fn born_approximation_for_small_contrast() {
        let g = build_disk_grid(40, 80).unwrap();
        let p = Phantom::radial(0.45, 1.05);
        let cond = p.conductivity(&g).unwrap();
        let lambda = c64(1.0, 0.0);
        let f = solve_lippmann_schwinger(&g, &cond, lambda, &CgoConfig::default()).unwrap();
        // born term: 1 + 2i sum g Q w
        let q = q_from_sigma(&g, &cond).unwrap();
        let mut worst = 0.0f64;
        for (i, &z) in g.nodes.iter().enumerate() {
            let mut born = c64(1.0, 0.0);
            for (jj, &x) in g.nodes.iter().enumerate() {
                if q[jj] != 0.0 && jj != i {
                    born += 2.0 * I * faddeev_g_fast(z - x, lambda) * (q[jj] * g.weights[jj]);
                }
            }
            worst = worst.max((f.mu[i] - born).norm());
        }
        // discrepancy is O(contrast^2) ~ 1e-3, far below the O(contrast)
        // deviation of mu from 1
        let dev = f.mu.iter().fold(0.0f64, |m, v| m.max((v - c64(1.0, 0.0)).norm()));
        assert!(worst < 0.05 * dev.max(1e-6), "born gap {worst}, field dev {dev}");
    }

    #[test]
    fn rotation_symmetry_of_radial_phantom() {
        // radial sigma: the field at rotated (z, lambda) matches the
        // unrotated one: mu(e^{ia} z, e^{-ia} lambda) = mu(z, lambda)
        let g = build_disk_grid(32, 64).unwrap();
        let p = Phantom::radial(0.5, 1.4);
        let cond = p.conductivity(&g).unwrap();
        let lambda = c64(1.3, 0.4);
        let quarter = c64(0.0, 1.0); // rotation by pi/2 maps the grid to itself
        let f1 = solve_lippmann_schwinger(&g, &cond, lambda, &CgoConfig::default()).unwrap();
        let f2 =
            solve_lippmann_schwinger(&g, &cond, lambda * quarter.conj(), &CgoConfig::default())
                .unwrap();
        // node rotated by pi/2: angular index shift by nt/4
        let nt = g.n_angular;
        let mut worst = 0.0f64;
        for j in 0..g.n_radial {
            for k in 0..nt {
                let rot = j * nt + (k + nt / 4) % nt;
                worst = worst.max((f1.mu[j * nt + k] - f2.mu[rot]).norm());
            }
        }
        assert!(worst < 1e-10, "rotation mismatch {worst}");
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        let g = build_disk_grid(24, 48).unwrap();
        let p = Phantom::offset(c64(0.2, 0.15), 0.3, 1.5);
        let cond = p.conductivity(&g).unwrap();
        // reflected conductivity sigma'(z) = sigma(conj z)
        let refl = Conductivity::from_fn(&g, cond.boundary_collar, |z| p.sigma(z.conj())).unwrap();
        let lambda = c64(0.9, 0.7);
        let f1 = solve_lippmann_schwinger(&g, &cond, lambda, &CgoConfig::default()).unwrap();
        let f2 = solve_lippmann_schwinger(&g, &refl, lambda.conj(), &CgoConfig::default()).unwrap();
        let nt = g.n_angular;
        let mut worst = 0.0f64;
        for j in 0..g.n_radial {
            for k in 0..nt {
                let conj_idx = j * nt + (nt - k) % nt;
                worst = worst.max((f2.mu[conj_idx] - f1.mu[j * nt + k].conj()).norm());
            }
        }
        assert!(worst < 1e-12, "conjugation mismatch {worst}");
    }

    #[test]
    fn boundary_equation_unit_sigma_returns_exponential() {
        let g = build_disk_grid(24, 48).unwrap();
        let ring = BoundaryRing::new(64).unwrap();
        let refop = assemble_dtn(&g, &Conductivity::uniform(&g), 8).unwrap();
        let (phi, phi0) = dbar_trace(&refop, &refop).unwrap();
        let lambda = c64(1.5, -0.7);
        let tr = solve_boundary_equation(&ring, &phi, &phi0, lambda, &CgoConfig::default()).unwrap();
        let mut worst = 0.0f64;
        for (k, &z) in ring.points.iter().enumerate() {
            worst = worst.max((tr.psi_b[k] - (lambda * z).exp()).norm());
        }
        assert!(worst < 1e-10, "unit-sigma trace deviates by {worst}");
        assert!(tr.c_residual < 1e-12);
    }

    #[test]
    fn boundary_equation_matches_interior_oracle() {
        // the central consistency claim: the trace recovered from DtN data
        // alone matches the interior solve evaluated on the ring
        let g = build_disk_grid(48, 96).unwrap();
        let ring = BoundaryRing::new(128).unwrap();
        let p = Phantom::radial(0.5, 1.3);
        let cond = p.conductivity(&g).unwrap();
        let nm = 12;
        let dtn = assemble_dtn(&g, &cond, nm).unwrap();
        let refop = assemble_dtn(&g, &Conductivity::uniform(&g), nm).unwrap();
        let (phi, phi0) = dbar_trace(&dtn, &refop).unwrap();
        let q = q_from_sigma(&g, &cond).unwrap();
        let mut rng = Rng::new(4);
        for _ in 0..2 {
            let lambda = rng.annulus(0.6, 1.6);
            let tr =
                solve_boundary_equation(&ring, &phi, &phi0, lambda, &CgoConfig::default()).unwrap();
            let interior =
                solve_lippmann_schwinger(&g, &cond, lambda, &CgoConfig::default()).unwrap();
            let oracle = ls_psi_at(&g, &q, &interior, &ring.points);
            let rel = rel_l2(&tr.psi_b, &oracle);
            assert!(rel <= 0.02, "lambda={lambda}: trace mismatch {rel}");
        }
    }

    #[test]
    fn exceptional_flagging_smoke() {
        // an absurd condition threshold forces the exceptional path
        let g = build_disk_grid(16, 32).unwrap();
        let ring = BoundaryRing::new(32).unwrap();
        let p = Phantom::radial(0.4, 1.3);
        let cond = p.conductivity(&g).unwrap();
        let dtn = assemble_dtn(&g, &cond, 4).unwrap();
        let refop = assemble_dtn(&g, &Conductivity::uniform(&g), 4).unwrap();
        let (phi, phi0) = dbar_trace(&dtn, &refop).unwrap();
        let cfg = CgoConfig { exceptional_cond: 1.0 + 1e-9, ..Default::default() };
        match solve_boundary_equation(&ring, &phi, &phi0, c64(1.0, 0.0), &cfg) {
            Err(Error::ExceptionalLambda { condition, .. }) => assert!(condition > 1.0),
            other => panic!("expected exceptional flag, got {other:?}"),
        }
    }

    #[test]
    fn reported_interior_residual_is_true_residual() {
        let g = build_disk_grid(32, 64).unwrap();
        let p = Phantom::radial(0.45, 1.4);
        let cond = p.conductivity(&g).unwrap();
        let f = solve_lippmann_schwinger(&g, &cond, c64(1.2, 0.5), &CgoConfig::default()).unwrap();
        assert!(f.residual < 1e-9, "residual {}", f.residual);
        assert!(max_abs(&f.mu) < 10.0);
    }
}
