//! Dense complex linear algebra, sparse real solvers and an FFT, sized for
//! desk-scale problems (systems up to a few thousand unknowns).

use alloc::vec;
use alloc::vec::Vec;

use crate::num::{c64, C64};
use crate::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct CMat {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat { nrows, ncols, data: vec![C64::new(0.0, 0.0); nrows * ncols] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.ncols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.ncols + j] += v;
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        for i in 0..self.nrows {
            let row = &self.data[i * self.ncols..(i + 1) * self.ncols];
            let mut s = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                s += a * b;
            }
            y[i] = s;
        }
        y
    }

    /// Conjugate-transpose apply, y = A^H x.
    pub fn matvec_adj(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.nrows);
        let mut y = vec![C64::new(0.0, 0.0); self.ncols];
        for i in 0..self.nrows {
            let row = &self.data[i * self.ncols..(i + 1) * self.ncols];
            let xi = x[i];
            for (j, a) in row.iter().enumerate() {
                y[j] += a.conj() * xi;
            }
        }
        y
    }

    /// 1-norm (max column sum of moduli).
    pub fn norm1(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.ncols {
            let mut s = 0.0;
            for i in 0..self.nrows {
                s += self.at(i, j).norm();
            }
            best = best.max(s);
        }
        best
    }
}

/// LU factorization with partial pivoting of a square complex matrix.
pub struct CluFactor {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
    /// product of pivot signs and pivots, for determinants
    det: C64,
}

pub fn clu_factor(a: &CMat) -> Result<CluFactor> {
    assert_eq!(a.nrows, a.ncols);
    let n = a.nrows;
    let mut lu = a.data.clone();
    let mut piv = vec![0usize; n];
    let mut det = c64(1.0, 0.0);
    for k in 0..n {
        let mut p = k;
        let mut pmax = lu[k * n + k].norm();
        for i in (k + 1)..n {
            let v = lu[i * n + k].norm();
            if v > pmax {
                pmax = v;
                p = i;
            }
        }
        if pmax == 0.0 || !pmax.is_finite() {
            return Err(Error::SolveFailure { what: "lu pivot", diagnostic: pmax });
        }
        piv[k] = p;
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = lu[k * n + k];
        det *= pivot;
        for i in (k + 1)..n {
            let m = lu[i * n + k] / pivot;
            lu[i * n + k] = m;
            if m.norm_sqr() != 0.0 {
                for j in (k + 1)..n {
                    let v = m * lu[k * n + j];
                    lu[i * n + j] -= v;
                }
            }
        }
    }
    Ok(CluFactor { n, lu, piv, det })
}

impl CluFactor {
    pub fn det(&self) -> C64 {
        self.det
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
        }
        for i in 1..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve with the conjugate transpose, A^H x = b.
    pub fn solve_adj(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x = b.to_vec();
        // A = P^T L U  =>  A^H = U^H L^H P, solve U^H y = b, L^H z = y, x = P^T z
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = s / self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[j * n + i].conj() * x[j];
            }
            x[i] = s;
        }
        for k in (0..n).rev() {
            x.swap(k, self.piv[k]);
        }
        x
    }
}

/// Hager-style 1-norm condition estimate from an existing factorization.
pub fn cond_estimate_1(a: &CMat, f: &CluFactor) -> f64 {
    let n = a.nrows;
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![c64(1.0 / n as f64, 0.0); n];
    let mut est = 0.0f64;
    for _ in 0..5 {
        let y = f.solve(&x);
        let ynorm: f64 = y.iter().map(|v| v.norm()).sum();
        est = ynorm;
        // xi = sign(y)
        let xi: Vec<C64> = y
            .iter()
            .map(|v| if v.norm() > 0.0 { v / v.norm() } else { c64(1.0, 0.0) })
            .collect();
        let z = f.solve_adj(&xi);
        let (mut jmax, mut zmax) = (0usize, 0.0f64);
        for (j, v) in z.iter().enumerate() {
            if v.norm() > zmax {
                zmax = v.norm();
                jmax = j;
            }
        }
        let xnorm1: f64 = x.iter().map(|v| v.norm()).sum();
        if zmax <= z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum::<f64>().abs() / xnorm1.max(1e-300) {
            break;
        }
        x = vec![C64::new(0.0, 0.0); n];
        x[jmax] = c64(1.0, 0.0);
    }
    a.norm1() * est
}

/// GMRES(m) with restarts for a complex operator given as a closure.
///
/// Returns (solution, relative residual, iterations).
pub fn gmres<F: Fn(&[C64]) -> Vec<C64>>(
    apply: F,
    b: &[C64],
    x0: Option<&[C64]>,
    restart: usize,
    max_outer: usize,
    tol: f64,
) -> (Vec<C64>, f64, usize) {
    let n = b.len();
    let bnorm = crate::num::norm2(b).max(1e-300);
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
    let mut total_it = 0usize;
    for _ in 0..max_outer {
        let ax = apply(&x);
        let mut r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = crate::num::norm2(&r);
        if beta / bnorm < tol {
            return (x, beta / bnorm, total_it);
        }
        for v in r.iter_mut() {
            *v /= beta;
        }
        let m = restart;
        let mut basis: Vec<Vec<C64>> = vec![r];
        let mut h = vec![C64::new(0.0, 0.0); (m + 1) * m]; // column-major h[i + j*(m+1)]
        let mut cs = vec![C64::new(0.0, 0.0); m];
        let mut sn = vec![C64::new(0.0, 0.0); m];
        let mut g = vec![C64::new(0.0, 0.0); m + 1];
        g[0] = c64(beta, 0.0);
        let mut k_used = 0;
        for j in 0..m {
            total_it += 1;
            let mut w = apply(&basis[j]);
            for i in 0..=j {
                let hij = w.iter().zip(&basis[i]).map(|(a, b)| a * b.conj()).sum::<C64>();
                h[i + j * (m + 1)] = hij;
                for (wv, bv) in w.iter_mut().zip(&basis[i]) {
                    *wv -= hij * bv;
                }
            }
            let hnext = crate::num::norm2(&w);
            h[(j + 1) + j * (m + 1)] = c64(hnext, 0.0);
            // apply accumulated rotations to the new column
            for i in 0..j {
                let t = cs[i] * h[i + j * (m + 1)] + sn[i] * h[(i + 1) + j * (m + 1)];
                let u = -sn[i].conj() * h[i + j * (m + 1)] + cs[i].conj() * h[(i + 1) + j * (m + 1)];
                h[i + j * (m + 1)] = t;
                h[(i + 1) + j * (m + 1)] = u;
            }
            let (a, bb) = (h[j + j * (m + 1)], h[(j + 1) + j * (m + 1)]);
            let denom = libm::sqrt(a.norm_sqr() + bb.norm_sqr()).max(1e-300);
            cs[j] = (a / denom).conj() * 1.0;
            sn[j] = (bb / denom).conj() * 1.0;
            h[j + j * (m + 1)] = cs[j] * a + sn[j] * bb;
            h[(j + 1) + j * (m + 1)] = C64::new(0.0, 0.0);
            let t = cs[j] * g[j];
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] = t;
            k_used = j + 1;
            if g[j + 1].norm() / bnorm < tol || hnext < 1e-300 {
                break;
            }
            if hnext > 0.0 {
                for wv in w.iter_mut() {
                    *wv /= hnext;
                }
                basis.push(w);
            }
        }
        // back substitution for y
        let mut y = vec![C64::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in (i + 1)..k_used {
                s -= h[i + j * (m + 1)] * y[j];
            }
            y[i] = s / h[i + i * (m + 1)];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xv, bv) in x.iter_mut().zip(&basis[j]) {
                *xv += yj * bv;
            }
        }
        let ax = apply(&x);
        let res = crate::num::norm2(
            &b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>(),
        ) / bnorm;
        if res < tol {
            return (x, res, total_it);
        }
    }
    let ax = apply(&x);
    let res =
        crate::num::norm2(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / bnorm;
    (x, res, total_it)
}

/// Compressed sparse row matrix over f64.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

/// Builder accumulating triplets.
pub struct CsrBuilder {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl CsrBuilder {
    pub fn new(n: usize) -> Self {
        CsrBuilder { n, rows: vec![Vec::new(); n] }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            self.rows[i].push((j, v));
        }
    }

    pub fn build(mut self) -> Csr {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in self.rows.iter_mut() {
            r.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < r.len() {
                let col = r[k].0;
                let mut s = 0.0;
                while k < r.len() && r[k].0 == col {
                    s += r[k].1;
                    k += 1;
                }
                cols.push(col);
                vals.push(s);
            }
            row_ptr.push(cols.len());
        }
        Csr { n: self.n, row_ptr, cols, vals }
    }
}

impl Csr {
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradient for SPD systems.
pub fn cg_solve(a: &Csr, b: &[f64], tol: f64, max_it: usize) -> Result<(Vec<f64>, f64, usize)> {
    let n = a.n;
    let d = a.diag();
    let minv: Vec<f64> = d.iter().map(|&v| if v.abs() > 0.0 { 1.0 / v } else { 1.0 }).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bnorm = libm::sqrt(dot(b, b)).max(1e-300);
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(ri, mi)| ri * mi).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_it {
        let rn = libm::sqrt(dot(&r, &r));
        if rn / bnorm < tol {
            return Ok((x, rn / bnorm, it));
        }
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::SolveFailure { what: "cg curvature", diagnostic: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * minv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rn = libm::sqrt(dot(&r, &r)) / bnorm;
    if rn < tol * 100.0 {
        Ok((x, rn, max_it))
    } else {
        Err(Error::SolveFailure { what: "cg max iterations", diagnostic: rn })
    }
}

/// BiCGStab with Jacobi preconditioning, for mildly non-SPD systems.
pub fn bicgstab_solve(a: &Csr, b: &[f64], tol: f64, max_it: usize) -> Result<(Vec<f64>, f64, usize)> {
    let n = a.n;
    let d = a.diag();
    let minv: Vec<f64> = d.iter().map(|&v| if v.abs() > 1e-300 { 1.0 / v } else { 1.0 }).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = r.clone();
    let bnorm = libm::sqrt(dot(b, b)).max(1e-300);
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 0..max_it {
        let rn = libm::sqrt(dot(&r, &r));
        if rn / bnorm < tol {
            return Ok((x, rn / bnorm, it));
        }
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < 1e-290 {
            return Err(Error::SolveFailure { what: "bicgstab breakdown", diagnostic: rho_new });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let ph: Vec<f64> = p.iter().zip(&minv).map(|(a, m)| a * m).collect();
        a.matvec_into(&ph, &mut v);
        alpha = rho / dot(&r0, &v);
        let s: Vec<f64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        let sh: Vec<f64> = s.iter().zip(&minv).map(|(a, m)| a * m).collect();
        a.matvec_into(&sh, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
    }
    let rn = libm::sqrt(dot(&r, &r)) / bnorm;
    if rn < tol * 100.0 {
        Ok((x, rn, max_it))
    } else {
        Err(Error::SolveFailure { what: "bicgstab max iterations", diagnostic: rn })
    }
}

/// In-place complex FFT. Length must be a power of two for the fast path;
/// otherwise falls back to a direct O(n^2) transform (grids here are small).
pub fn fft(data: &mut [C64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n & (n - 1) != 0 {
        let out = dft_slow(data, inverse);
        data.copy_from_slice(&out);
        return;
    }
    // bit reversal
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * core::f64::consts::TAU / len as f64;
        let wl = c64(libm::cos(ang), libm::sin(ang));
        let mut i = 0;
        while i < n {
            let mut w = c64(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[i + k];
                let v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wl;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

fn dft_slow(data: &[C64], inverse: bool) -> Vec<C64> {
    let n = data.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = C64::new(0.0, 0.0);
        for (j, v) in data.iter().enumerate() {
            let ang = sign * core::f64::consts::TAU * (k * j % n) as f64 / n as f64;
            s += v * c64(libm::cos(ang), libm::sin(ang));
        }
        *o = if inverse { s / n as f64 } else { s };
    }
    out
}

/// Solve a (transposed) Vandermonde-structured system sum_m c_m x_m^k = f_k,
/// k = 1..n, by plain LU on the small dense matrix; nodes x_m must be
/// distinct. Returns the coefficients c_m and the condition estimate.
pub fn vandermonde_solve(nodes: &[C64], rhs: &[C64]) -> Result<(Vec<C64>, f64)> {
    let n = nodes.len();
    assert_eq!(rhs.len(), n);
    for i in 0..n {
        for j in 0..i {
            if (nodes[i] - nodes[j]).norm() < 1e-12 {
                return Err(Error::InvalidArgument("vandermonde nodes coincide"));
            }
        }
    }
    let mut a = CMat::zeros(n, n);
    for k in 0..n {
        for m in 0..n {
            // row k corresponds to power k+1
            let mut p = c64(1.0, 0.0);
            for _ in 0..=k {
                p *= nodes[m];
            }
            a.set(k, m, p);
        }
    }
    let f = clu_factor(&a)?;
    let cond = cond_estimate_1(&a, &f);
    Ok((f.solve(rhs), cond))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rng;

    #[test]
    fn lu_solves_random_system() {
        let n = 40;
        let mut rng = Rng::new(11);
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, c64(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)));
            }
            a.add(i, i, c64(4.0, 0.0));
        }
        let xtrue: Vec<C64> = (0..n).map(|_| c64(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))).collect();
        let b = a.matvec(&xtrue);
        let f = clu_factor(&a).unwrap();
        let x = f.solve(&b);
        assert!(crate::num::rel_l2(&x, &xtrue) < 1e-11);
        // adjoint solve
        let badj = a.matvec_adj(&xtrue);
        let xa = f.solve_adj(&badj);
        assert!(crate::num::rel_l2(&xa, &xtrue) < 1e-11);
    }

    #[test]
    fn determinant_of_diagonal() {
        let mut a = CMat::zeros(3, 3);
        a.set(0, 0, c64(2.0, 0.0));
        a.set(1, 1, c64(0.0, 3.0));
        a.set(2, 2, c64(-1.0, 0.0));
        let f = clu_factor(&a).unwrap();
        assert!((f.det() - c64(0.0, -6.0)).norm() < 1e-14);
    }

    #[test]
    fn cond_estimate_identity_is_small() {
        let mut a = CMat::zeros(5, 5);
        for i in 0..5 {
            a.set(i, i, c64(1.0, 0.0));
        }
        let f = clu_factor(&a).unwrap();
        let c = cond_estimate_1(&a, &f);
        assert!((0.5..=2.0).contains(&c));
    }

    #[test]
    fn gmres_matches_lu() {
        let n = 30;
        let mut rng = Rng::new(5);
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, c64(rng.range(-0.2, 0.2), rng.range(-0.2, 0.2)));
            }
            a.add(i, i, c64(2.0, 0.4));
        }
        let b: Vec<C64> = (0..n).map(|_| c64(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))).collect();
        let f = clu_factor(&a).unwrap();
        let xd = f.solve(&b);
        let (xg, res, _) = gmres(|v| a.matvec(v), &b, None, 25, 8, 1e-12);
        assert!(res < 1e-10);
        assert!(crate::num::rel_l2(&xg, &xd) < 1e-8);
    }

    #[test]
    fn cg_solves_laplacian_like_system() {
        // 1D Poisson matrix
        let n = 200;
        let mut b = CsrBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 2.0);
            if i > 0 {
                b.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                b.add(i, i + 1, -1.0);
            }
        }
        let a = b.build();
        let rhs = vec![1.0; n];
        let (x, res, _) = cg_solve(&a, &rhs, 1e-12, 2000).unwrap();
        assert!(res < 1e-10);
        let mut ax = vec![0.0; n];
        a.matvec_into(&x, &mut ax);
        let err: f64 = ax.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8);
        // bicgstab agrees
        let (x2, res2, _) = bicgstab_solve(&a, &rhs, 1e-12, 2000).unwrap();
        assert!(res2 < 1e-9);
        let d: f64 = x.iter().zip(&x2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 1e-6);
    }

    #[test]
    fn fft_roundtrip_and_delta() {
        let n = 64;
        let mut rng = Rng::new(9);
        let orig: Vec<C64> = (0..n).map(|_| c64(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))).collect();
        let mut d = orig.clone();
        fft(&mut d, false);
        fft(&mut d, true);
        assert!(crate::num::rel_l2(&d, &orig) < 1e-12);
        // delta transforms to all-ones
        let mut e = vec![C64::new(0.0, 0.0); 8];
        e[0] = c64(1.0, 0.0);
        fft(&mut e, false);
        for v in &e {
            assert!((v - c64(1.0, 0.0)).norm() < 1e-13);
        }
        // non power of two falls back to slow DFT, still a roundtrip
        let orig12: Vec<C64> = (0..12).map(|_| c64(rng.range(-1.0, 1.0), 0.0)).collect();
        let mut d12 = orig12.clone();
        fft(&mut d12, false);
        fft(&mut d12, true);
        assert!(crate::num::rel_l2(&d12, &orig12) < 1e-12);
    }

    #[test]
    fn vandermonde_recovery() {
        let nodes = [c64(0.0, 2.0), c64(0.0, -2.0)];
        let ctrue = [c64(1.5, 0.0), c64(-0.5, 0.3)];
        let mut rhs = [C64::new(0.0, 0.0); 2];
        for k in 0..2 {
            for m in 0..2 {
                let mut p = c64(1.0, 0.0);
                for _ in 0..=k {
                    p *= nodes[m];
                }
                rhs[k] += ctrue[m] * p;
            }
        }
        let (c, cond) = vandermonde_solve(&nodes, &rhs).unwrap();
        assert!(crate::num::rel_l2(&c, &ctrue) < 1e-12);
        assert!(cond < 1e3);
        // coincident nodes rejected
        assert!(vandermonde_solve(&[c64(1.0, 0.0), c64(1.0, 0.0)], &rhs).is_err());
    }
}
