//! Affine algebraic curves P(z1, z2) = 0 in C^2 at explicit-kernel level:
//! branch solving, critical points of the pencil dz1 + theta dz2, the
//! Cauchy-type kernel of the dbar inverse, stationary-phase integrals and
//! their closed models, Vandermonde recovery of the potential at critical
//! points, and the determinant asymptotics with its exponential-polynomial
//! reading.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{vandermonde_solve, CMat};
use crate::num::{c64, C64, I};
use crate::poly::{resultant_z2, BivarPoly};
use crate::{Error, Result};

/// A regular affine curve with its chart bookkeeping.
#[derive(Debug, Clone)]
pub struct AlgebraicCurve {
    pub p: BivarPoly,
    pub degree: usize,
    /// chart radius: |z1| <= r0 is the region the stationary-phase work
    /// happens in
    pub r0: f64,
}

impl AlgebraicCurve {
    pub fn new(p: BivarPoly, r0: f64) -> Result<Self> {
        let degree = p.total_degree();
        if degree < 2 {
            return Err(Error::InvalidArgument("curve: degree must be at least 2"));
        }
        Ok(AlgebraicCurve { p, degree, r0 })
    }

    /// x1^2 + x2^2 = 1.
    pub fn ellipse() -> Self {
        let p = BivarPoly::from_terms(&[
            (2, 0, c64(1.0, 0.0)),
            (0, 2, c64(1.0, 0.0)),
            (0, 0, c64(-1.0, 0.0)),
        ]);
        AlgebraicCurve::new(p, 2.0).unwrap()
    }

    /// Smooth plane cubic x1^3 + x2^3 = 1 (genus 1, transversal to the line
    /// at infinity).
    pub fn fermat_cubic() -> Self {
        let p = BivarPoly::from_terms(&[
            (3, 0, c64(1.0, 0.0)),
            (0, 3, c64(1.0, 0.0)),
            (0, 0, c64(-1.0, 0.0)),
        ]);
        AlgebraicCurve::new(p, 2.0).unwrap()
    }

    pub fn p1(&self, z1: C64, z2: C64) -> C64 {
        self.p.d1().eval(z1, z2)
    }

    pub fn p2(&self, z1: C64, z2: C64) -> C64 {
        self.p.d2().eval(z1, z2)
    }

    /// Verify curve regularity (gradient nonzero) at a sample of points.
    pub fn check_regularity(&self, samples: &[(C64, C64)]) -> Result<()> {
        for &(z1, z2) in samples {
            let g1 = self.p1(z1, z2);
            let g2 = self.p2(z1, z2);
            if g1.norm() + g2.norm() < 1e-10 {
                return Err(Error::InvalidArgument("curve: singular point on the curve"));
            }
        }
        Ok(())
    }

    /// Slopes dz2/dz1 of the branches at infinity: roots of the top-degree
    /// homogeneous part evaluated at (1, gamma). Exact for curves meeting
    /// the line at infinity transversally.
    pub fn infinity_slopes(&self) -> Vec<C64> {
        let n = self.degree;
        let coeffs: Vec<C64> = (0..=n).map(|j| self.p.coeff(n - j, j)).collect();
        crate::poly::CPoly::new(coeffs).trimmed().roots()
    }

    /// Forbidden theta values -1/gamma_l.
    pub fn forbidden_thetas(&self) -> Vec<C64> {
        self.infinity_slopes()
            .iter()
            .filter(|g| g.norm() > 1e-12)
            .map(|&g| -1.0 / g)
            .collect()
    }

    /// Genericity margin of a theta value.
    pub fn theta_margin(&self, theta: C64) -> f64 {
        self.forbidden_thetas()
            .iter()
            .map(|&t| (theta - t).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Branch values z2 with multiplicity flags (true = part of a root cluster,
/// i.e. z1 sits at or numerically near a branch point).
pub fn curve_points(curve: &AlgebraicCurve, z1: C64) -> Result<Vec<(C64, bool)>> {
    let uni = curve.p.z2_poly_at(z1).trimmed();
    if uni.degree() == 0 {
        return Err(Error::InvalidArgument("curve_points: P(z1, .) constant"));
    }
    let mut roots = uni.roots();
    // polish
    let dp = uni.deriv();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*r);
            if d.norm() > 1e-12 {
                *r -= uni.eval(*r) / d;
            }
        }
    }
    let scale = 1.0 + roots.iter().fold(0.0f64, |m, r| m.max(r.norm()));
    let flags: Vec<bool> = roots
        .iter()
        .enumerate()
        .map(|(i, &ri)| {
            roots
                .iter()
                .enumerate()
                .any(|(j, &rj)| i != j && (ri - rj).norm() < 1e-5 * scale)
        })
        .collect();
    Ok(roots.into_iter().zip(flags).collect())
}

/// Continue a branch along a caller-supplied z1 path: at each step the root
/// nearest to the previous value is taken (steps must stay clear of branch
/// points for the tracking to be well defined).
pub fn branch_continuation(curve: &AlgebraicCurve, path: &[C64], start_z2: C64) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(path.len());
    let mut current = start_z2;
    for &z1 in path {
        let roots = curve_points(curve, z1)?;
        let best = roots
            .iter()
            .min_by(|a, b| (a.0 - current).norm().partial_cmp(&(b.0 - current).norm()).unwrap())
            .ok_or(Error::InvalidArgument("branch_continuation: no roots"))?;
        current = best.0;
        out.push(current);
    }
    Ok(out)
}

/// A critical point of the pencil dz1 + theta dz2 on the curve.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub w: (C64, C64),
    pub theta: C64,
    /// dP/dz1 at w (nonzero for generic theta)
    pub first_deriv: C64,
    /// the Hessian combination P11 P2^2 - 2 P12 P2 P1 + P22 P1^2 at w
    pub second_order: C64,
    /// stationary phase node 2 Re(w1 + theta w2)
    pub phase_node: f64,
}

#[inline]
fn cube(x: f64) -> f64 {
    x * x * x
}

fn hessian_bracket(curve: &AlgebraicCurve, z1: C64, z2: C64) -> C64 {
    let p1 = curve.p.d1();
    let p2 = curve.p.d2();
    let p11 = p1.d1().eval(z1, z2);
    let p12 = p1.d2().eval(z1, z2);
    let p22 = p2.d2().eval(z1, z2);
    let g1 = p1.eval(z1, z2);
    let g2 = p2.eval(z1, z2);
    p11 * g2 * g2 - 2.0 * p12 * g2 * g1 + p22 * g1 * g1
}

/// All critical points {P = 0, P_2 - theta P_1 = 0} by resultant
/// elimination with Newton polish. For generic theta of a regular curve of
/// degree N this returns exactly N(N-1) simple points.
pub fn find_critical_points(curve: &AlgebraicCurve, theta: C64) -> Result<Vec<CriticalPoint>> {
    let pz1 = curve.p.d1();
    let pz2 = curve.p.d2();
    let pencil = pz2.lin_comb(c64(1.0, 0.0), &pz1, -theta);
    let res = resultant_z2(&curve.p, &pencil)?;
    let expected = curve.degree * (curve.degree - 1);
    if res.degree() < expected {
        return Err(Error::InvalidArgument(
            "find_critical_points: resultant degenerates (theta not generic)",
        ));
    }
    let z1_roots = res.roots();
    let mut points: Vec<CriticalPoint> = Vec::new();
    let pencil_d1 = pencil.d1();
    let pencil_d2 = pencil.d2();
    for &z1r in &z1_roots {
        // candidate z2 values on the curve above z1r, nearest-to-critical first
        let mut cands = curve_points(curve, z1r)?;
        cands.sort_by(|a, b| {
            pencil
                .eval(z1r, a.0)
                .norm()
                .partial_cmp(&pencil.eval(z1r, b.0).norm())
                .unwrap()
        });
        let mut found: Option<(C64, C64, f64)> = None;
        for &(z2c, _) in &cands {
            // polish the 2x2 system (P, P2 - theta P1)
            let (mut x, mut y) = (z1r, z2c);
            for _ in 0..40 {
                let f1 = curve.p.eval(x, y);
                let f2 = pencil.eval(x, y);
                let j11 = pz1.eval(x, y);
                let j12 = pz2.eval(x, y);
                let j21 = pencil_d1.eval(x, y);
                let j22 = pencil_d2.eval(x, y);
                let det = j11 * j22 - j12 * j21;
                if det.norm() < 1e-14 {
                    break;
                }
                let dx = (f1 * j22 - f2 * j12) / det;
                let dy = (j11 * f2 - j21 * f1) / det;
                x -= dx;
                y -= dy;
                if dx.norm() + dy.norm() < 1e-15 * (1.0 + x.norm() + y.norm()) {
                    break;
                }
            }
            let resid = curve.p.eval(x, y).norm() + pencil.eval(x, y).norm();
            // the polish must stay above the resultant root: a jump to a
            // critical point over a different z1 root double-counts it
            if resid <= 1e-8 && (x - z1r).norm() <= 1e-4 * (1.0 + z1r.norm()) {
                found = Some((x, y, resid));
                break;
            }
        }
        let Some((x, y, _)) = found else {
            continue; // spurious resultant root (numerical)
        };
        // dedupe
        if points
            .iter()
            .any(|p| (p.w.0 - x).norm() + (p.w.1 - y).norm() < 1e-7 * (1.0 + x.norm() + y.norm()))
        {
            return Err(Error::InvalidArgument(
                "find_critical_points: coincident critical points (theta degenerate)",
            ));
        }
        let fd = pz1.eval(x, y);
        if fd.norm() < 1e-10 {
            return Err(Error::InvalidArgument("find_critical_points: dP/dz1 vanishes at w"));
        }
        let so = hessian_bracket(curve, x, y);
        if so.norm() < 1e-10 {
            return Err(Error::InvalidArgument("find_critical_points: degenerate second order"));
        }
        let zt = x + theta * y;
        points.push(CriticalPoint {
            w: (x, y),
            theta,
            first_deriv: fd,
            second_order: so,
            phase_node: 2.0 * zt.re,
        });
    }
    if points.len() != expected {
        return Err(Error::InvalidArgument("find_critical_points: count differs from N(N-1)"));
    }
    Ok(points)
}

/// Chart patch on the curve: a square z2-grid with the z1 branch tracked by
/// row-serpentine continuation from the center.
#[derive(Debug, Clone)]
pub struct CurvePatch {
    pub n: usize,
    pub h: f64,
    pub center_z2: C64,
    pub z2: Vec<C64>,
    pub z1: Vec<C64>,
}

impl CurvePatch {
    pub fn build(
        curve: &AlgebraicCurve,
        center_z2: C64,
        z1_near: C64,
        half_width: f64,
        n: usize,
    ) -> Result<Self> {
        let h = 2.0 * half_width / n as f64;
        let node =
            |i: usize, j: usize| center_z2 + c64(-half_width + (i as f64 + 0.5) * h, -half_width + (j as f64 + 0.5) * h);
        let mut z2v = vec![C64::new(0.0, 0.0); n * n];
        let mut z1v = vec![C64::new(0.0, 0.0); n * n];
        // first node: nearest root to z1_near
        let mut row_seed = {
            let roots = curve_points_z1(curve, node(0, 0))?;
            nearest(&roots, z1_near)
        };
        for j in 0..n {
            let mut cur = row_seed;
            for i in 0..n {
                let t = node(i, j);
                let roots = curve_points_z1(curve, t)?;
                cur = nearest(&roots, cur);
                z2v[j * n + i] = t;
                z1v[j * n + i] = cur;
                if i == 0 {
                    row_seed = cur;
                }
            }
        }
        Ok(CurvePatch { n, h, center_z2, z2: z2v, z1: z1v })
    }

    /// induced measure factor of dd^c|z|^2 restricted to the curve, per
    /// chart node: 4 (1 + |dz1/dz2|^2)
    pub fn area_factor(&self, curve: &AlgebraicCurve, idx: usize) -> f64 {
        let g = gamma(curve, self.z1[idx], self.z2[idx]);
        4.0 * (1.0 + g.norm_sqr())
    }
}

/// roots z1 of P(., z2): the patch charts parametrize by z2
fn curve_points_z1(curve: &AlgebraicCurve, z2: C64) -> Result<Vec<C64>> {
    // swap variables: coefficients in z1 at fixed z2
    let mut coeffs = vec![C64::new(0.0, 0.0); curve.p.n1];
    for (i, cf) in coeffs.iter_mut().enumerate() {
        let mut s = C64::new(0.0, 0.0);
        for j in (0..curve.p.n2).rev() {
            s = s * z2 + curve.p.coeff(i, j);
        }
        *cf = s;
    }
    let uni = crate::poly::CPoly::new(coeffs).trimmed();
    if uni.degree() == 0 {
        return Err(Error::InvalidArgument("curve patch: no z1 branch"));
    }
    Ok(uni.roots())
}

fn nearest(roots: &[C64], target: C64) -> C64 {
    *roots
        .iter()
        .min_by(|a, b| (**a - target).norm().partial_cmp(&(**b - target).norm()).unwrap())
        .unwrap()
}

/// slope dz1/dz2 on the curve
fn gamma(curve: &AlgebraicCurve, z1: C64, z2: C64) -> C64 {
    -curve.p2(z1, z2) / curve.p1(z1, z2)
}

/// The scalar Cauchy-type kernel of the dbar inverse on the curve: for a
/// (0,1) density concentrated at `a`, the value at `z` of the function part
/// of the inverse,
///
/// ```text
/// s(z, a) = (1/2 pi i) [P_1(a)(conj(a2 - z2)) - P_2(a)(conj(a1 - z1))]
///           / (|a - z|^2 (theta P_1(a) - P_2(a))).
/// ```
///
/// The contraction factor is chart-free; `rhat_dirac_chart2` evaluates the
/// same object through the z1-chart bookkeeping as an independent route.
pub fn rhat_dirac(curve: &AlgebraicCurve, theta: C64, a: (C64, C64), z: (C64, C64)) -> C64 {
    let p1a = curve.p1(a.0, a.1);
    let p2a = curve.p2(a.0, a.1);
    let num = p1a * (a.1 - z.1).conj() - p2a * (a.0 - z.0).conj();
    let den = (a.0 - z.0).norm_sqr() + (a.1 - z.1).norm_sqr();
    num / (den * (theta * p1a - p2a)) / (core::f64::consts::TAU * I)
}

/// Same kernel derived in the z1-chart: the Dirac contraction against the
/// frame (1 + theta dz2/dz1) dz1 instead of (dz1/dz2 + theta) dz2.
pub fn rhat_dirac_chart2(curve: &AlgebraicCurve, theta: C64, a: (C64, C64), z: (C64, C64)) -> C64 {
    let p1a = curve.p1(a.0, a.1);
    let p2a = curve.p2(a.0, a.1);
    let gamma_tilde = -p1a / p2a; // dz2/dz1
    let num = p1a * (a.1 - z.1).conj() - p2a * (a.0 - z.0).conj();
    let den = (a.0 - z.0).norm_sqr() + (a.1 - z.1).norm_sqr();
    let contraction = -1.0 / (1.0 + theta * gamma_tilde);
    num / (den * p2a) * contraction / (core::f64::consts::TAU * I)
}

/// Apply the curve Cauchy transform to a compactly supported (0,1) density
/// phi given by its dt2-bar component on a chart patch:
///
/// ```text
/// (R phi)(z) = (1/pi) Int phi(t) gamma(t) Ktilde(xi(t), z) / P_2(xi(t)) dA(t)
/// ```
///
/// with the diagonal handled by symmetric omission (the Cauchy model
/// integrates to zero over the centered cell).
pub fn r1_apply(
    curve: &AlgebraicCurve,
    patch: &CurvePatch,
    phi: &[C64],
    z: (C64, C64),
) -> Result<C64> {
    if phi.len() != patch.z2.len() {
        return Err(Error::InvalidArgument("r1_apply: density length mismatch"));
    }
    let mut acc = C64::new(0.0, 0.0);
    let w = patch.h * patch.h;
    for idx in 0..phi.len() {
        if phi[idx] == C64::new(0.0, 0.0) {
            continue;
        }
        let xi1 = patch.z1[idx];
        let xi2 = patch.z2[idx];
        let d2 = (xi1 - z.0).norm_sqr() + (xi2 - z.1).norm_sqr();
        if d2 < 0.25 * patch.h * patch.h {
            continue; // symmetric PV omission of the singular cell
        }
        let p1 = curve.p1(xi1, xi2);
        let p2 = curve.p2(xi1, xi2);
        let ktilde = (p1 * (xi2 - z.1).conj() - p2 * (xi1 - z.0).conj()) / d2;
        let g = -p2 / p1;
        acc += phi[idx] * g * ktilde / p2;
    }
    Ok(acc * w / core::f64::consts::PI)
}

/// Direct oscillatory integral over a chart patch:
///
/// ```text
/// Int_V e^{i tau (ztild1 + conj(ztild1))} q  with  ztild1 = z1 + theta z2,
/// ```
///
/// where `q_fn` is the scalar density of the 2-form q against dd^c|z|^2
/// restricted to the curve. This is the oracle side.
pub fn stationary_phase_integral(
    curve: &AlgebraicCurve,
    patch: &CurvePatch,
    q_fn: impl Fn(C64, C64) -> f64,
    theta: C64,
    tau: f64,
    derivative_order: usize,
) -> Result<C64> {
    // oscillation budget: phase scale 2 tau d(Re ztild1)/dt
    let max_slope = (0..patch.z2.len())
        .map(|i| (gamma(curve, patch.z1[i], patch.z2[i]) + theta).norm())
        .fold(0.0f64, f64::max);
    if patch.h > core::f64::consts::PI / (6.0 * tau.abs().max(1.0) * max_slope.max(1e-6)) {
        return Err(Error::OscillationBudget { what: "stationary_phase_integral", tau });
    }
    let mut acc = C64::new(0.0, 0.0);
    let w = patch.h * patch.h;
    for idx in 0..patch.z2.len() {
        let (z1, z2) = (patch.z1[idx], patch.z2[idx]);
        let qv = q_fn(z1, z2);
        if qv == 0.0 {
            continue;
        }
        let zt = z1 + theta * z2;
        let phase = 2.0 * tau * zt.re;
        let mut term = c64(libm::cos(phase), libm::sin(phase)) * (qv * patch.area_factor(curve, idx) * w);
        // d^k/dtau^k multiplies by (i (ztild1 + conj))^k = (2 i Re ztild1)^k
        for _ in 0..derivative_order {
            term *= 2.0 * I * zt.re;
        }
        acc += term;
    }
    Ok(acc)
}

/// Closed stationary-phase model of the same integral: the sum over
/// critical points
///
/// ```text
/// sum_m (4 pi / tau) (1 + |theta|^2) |P_1(w_m)|^3 q(w_m)
///        e^{2 i tau Re(w_m1 + theta w_m2)} / |bracket(w_m)|.
/// ```
///
/// The constant is pinned by the direct-quadrature oracle test; the same
/// kernel under the same conventions also drives the recovery system below.
pub fn stationary_phase_model(
    critical_points: &[CriticalPoint],
    q_fn: impl Fn(C64, C64) -> f64,
    tau: f64,
) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for cp in critical_points {
        let amp = 4.0 * core::f64::consts::PI / tau
            * (1.0 + cp.theta.norm_sqr())
            * cube(cp.first_deriv.norm())
            / cp.second_order.norm();
        let phase = tau * cp.phase_node;
        acc += c64(libm::cos(phase), libm::sin(phase)) * (amp * q_fn(cp.w.0, cp.w.1));
    }
    acc
}

/// Interior-oracle functionals for the recovery system: the k-th tau
/// derivative of `Int e_{i tau, theta} q mu / 2i` with the Born policy
/// mu = 1, over a union of patches covering the support of q.
pub fn recovery_functionals(
    curve: &AlgebraicCurve,
    patches: &[&CurvePatch],
    q_fn: impl Fn(C64, C64) -> f64 + Copy,
    theta: C64,
    tau: f64,
    orders: core::ops::RangeInclusive<usize>,
) -> Result<Vec<C64>> {
    let mut out = Vec::new();
    for k in orders {
        let mut v = C64::new(0.0, 0.0);
        for patch in patches {
            v += stationary_phase_integral(curve, patch, q_fn, theta, tau, k)?;
        }
        out.push(v / (2.0 * I));
    }
    Ok(out)
}

/// Recover Q at the critical points from the tau-derivative functionals:
/// the M x M system
///
/// ```text
/// tau G_k(tau) = sum_m Q(w_m) c_m (i s_m)^k e^{i tau s_m},   k = 1..M,
/// c_m = -2 pi i (1 + |theta|^2) |P_1|^3 / |bracket|,  s_m = phase node,
/// ```
///
/// whose determinant is the Vandermonde of the nodes i s_m up to column
/// scaling. Returns the Q estimates and the condition estimate.
pub fn vandermonde_recover_q(
    critical_points: &[CriticalPoint],
    functionals: &[C64],
    tau: f64,
) -> Result<(Vec<C64>, f64)> {
    let m = critical_points.len();
    if functionals.len() != m {
        return Err(Error::InvalidArgument("vandermonde_recover_q: need one functional per point"));
    }
    let nodes: Vec<C64> = critical_points.iter().map(|cp| I * cp.phase_node).collect();
    for i in 0..m {
        for j in 0..i {
            if (nodes[i] - nodes[j]).norm() < 1e-9 {
                return Err(Error::InvalidArgument("vandermonde_recover_q: coincident phase nodes"));
            }
        }
    }
    let rhs: Vec<C64> = functionals.iter().map(|&f| f * tau).collect();
    let (coef, cond) = vandermonde_solve(&nodes, &rhs)?;
    if cond > 1e10 {
        return Err(Error::SolveFailure { what: "vandermonde system condition", diagnostic: cond });
    }
    let mut q = Vec::with_capacity(m);
    for (i, cp) in critical_points.iter().enumerate() {
        let c_m = -core::f64::consts::TAU * I * (1.0 + cp.theta.norm_sqr())
            * cube(cp.first_deriv.norm())
            / cp.second_order.norm();
        let phase = c64(libm::cos(tau * cp.phase_node), libm::sin(tau * cp.phase_node));
        q.push(coef[i] / (c_m * phase));
    }
    Ok((q, cond))
}

/// A generic divisor with its theta bookkeeping.
#[derive(Debug, Clone)]
pub struct DivisorTheta {
    pub points: Vec<(C64, C64)>,
    pub theta: C64,
    pub forbidden_thetas: Vec<C64>,
    pub genericity_margin: f64,
}

impl DivisorTheta {
    pub fn new(curve: &AlgebraicCurve, theta: C64, points: Vec<(C64, C64)>) -> Result<Self> {
        let forbidden = curve.forbidden_thetas();
        let margin = forbidden.iter().map(|&t| (theta - t).norm()).fold(f64::INFINITY, f64::min);
        if !(margin > 1e-6) {
            return Err(Error::InvalidArgument("divisor: theta not generic"));
        }
        if theta.norm() < 1e-9 {
            return Err(Error::InvalidArgument(
                "divisor: theta = 0 not supported by the kernel scalarization",
            ));
        }
        Ok(DivisorTheta { points, theta, forbidden_thetas: forbidden, genericity_margin: margin })
    }
}

/// Output of the determinant asymptotics.
#[derive(Debug, Clone)]
pub struct DeltaTheta {
    pub matrix: CMat,
    pub det: C64,
    /// |lambda|^g det, the bounded surrogate
    pub surrogate: C64,
}

fn e_lambda_theta(lambda: C64, theta: C64, z: (C64, C64)) -> C64 {
    let zt = z.0 + theta * z.1;
    let arg = lambda * zt - (lambda * zt).conj();
    arg.exp()
}

/// Assemble the g x g two-term asymptotic matrix of the divisor determinant
/// and return |lambda|^g det as the surrogate. Holomorphic forms are given
/// unnormalized as coefficient polynomials c_k with omega_k = c_k dz1 / P_2;
/// the determinant's zero set and the boundedness statements are invariant
/// under that scaling (the factor is conj(c)^g and is logged by the caller).
pub fn delta_theta_asymptotic(
    curve: &AlgebraicCurve,
    divisor: &DivisorTheta,
    holo_forms: &[BivarPoly],
    critical_points: &[CriticalPoint],
    lambda: C64,
) -> Result<DeltaTheta> {
    let g = divisor.points.len();
    if holo_forms.len() != g {
        return Err(Error::InvalidArgument("delta_theta: need g holomorphic forms"));
    }
    let theta = divisor.theta;
    // divisor genericity: det[omega_j / dz1 (a_k)] != 0
    let mut gen = CMat::zeros(g, g);
    for (j, form) in holo_forms.iter().enumerate() {
        for (k, &a) in divisor.points.iter().enumerate() {
            gen.set(j, k, form.eval(a.0, a.1) / curve.p2(a.0, a.1));
        }
    }
    let gf = crate::linalg::clu_factor(&gen)
        .map_err(|_| Error::InvalidArgument("delta_theta: divisor not generic"))?;
    if gf.det().norm() < 1e-12 {
        return Err(Error::InvalidArgument("delta_theta: divisor not generic"));
    }
    let mut matrix = CMat::zeros(g, g);
    for (j, &a) in divisor.points.iter().enumerate() {
        let e_a = e_lambda_theta(lambda, theta, a);
        for (k, form) in holo_forms.iter().enumerate() {
            // omega_k / (dzbar1 + thetabar dzbar2) at a
            let rho = (form.eval(a.0, a.1)
                / (curve.p2(a.0, a.1) - theta * curve.p1(a.0, a.1)))
            .conj();
            let mut entry = -e_a * rho / lambda.conj();
            for cp in critical_points {
                let b = cp.w;
                let e_b = e_lambda_theta(lambda, theta, b);
                // scalar kernel density times the dz1-scalarized form
                let s = rhat_dirac(curve, theta, a, b);
                let wbar = (form.eval(b.0, b.1) / curve.p2(b.0, b.1)).conj();
                let kjk = cube(cp.first_deriv.norm()) * (1.0 + theta.norm_sqr()) * s * wbar
                    / cp.second_order.norm();
                entry -= core::f64::consts::PI / lambda.norm() * e_b * kjk;
            }
            matrix.set(j, k, entry);
        }
    }
    let det = crate::linalg::clu_factor(&matrix).map(|f| f.det()).unwrap_or(C64::new(0.0, 0.0));
    let surrogate = det * libm::pow(lambda.norm(), g as f64);
    Ok(DeltaTheta { matrix, det, surrogate })
}
