//! Complex polynomials: univariate root finding (Aberth-Ehrlich) and
//! bivariate polynomials with resultant elimination, the workhorses of the
//! curve module.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{clu_factor, CMat};
use crate::num::{c64, C64};
use crate::{Error, Result};

/// Univariate polynomial, `coeffs[k]` multiplying x^k.
#[derive(Debug, Clone)]
pub struct CPoly {
    pub coeffs: Vec<C64>,
}

impl CPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        CPoly { coeffs }
    }

    /// Degree after trimming numerically negligible leading coefficients.
    pub fn trimmed(&self) -> CPoly {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let mut c = self.coeffs.clone();
        while c.len() > 1 {
            if c.last().unwrap().norm() <= 1e-13 * scale {
                c.pop();
            } else {
                break;
            }
        }
        CPoly { coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            s = s * x + c;
        }
        s
    }

    pub fn deriv(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly::new(vec![C64::new(0.0, 0.0)]);
        }
        CPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * (k + 1) as f64)
                .collect(),
        )
    }

    /// All complex roots by the Aberth-Ehrlich simultaneous iteration.
    /// Deterministic start; degrees here are small (<= ~20).
    pub fn roots(&self) -> Vec<C64> {
        let p = self.trimmed();
        let n = p.degree();
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![-p.coeffs[0] / p.coeffs[1]];
        }
        let lead = p.coeffs[n];
        let radius = 1.0
            + p.coeffs[..n]
                .iter()
                .fold(0.0f64, |m, c| m.max((c / lead).norm()));
        let dp = p.deriv();
        let mut z: Vec<C64> = (0..n)
            .map(|k| {
                let ang = core::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.41;
                C64::from_polar(radius * 0.8, ang)
            })
            .collect();
        for _ in 0..300 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pv = p.eval(z[i]);
                let dv = dp.eval(z[i]);
                let ratio = if dv.norm() > 1e-290 { pv / dv } else { pv / c64(1e-290, 0.0) };
                let mut s = C64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        let d = z[i] - z[j];
                        if d.norm() > 1e-290 {
                            s += 1.0 / d;
                        }
                    }
                }
                let denom = c64(1.0, 0.0) - ratio * s;
                let w = if denom.norm() > 1e-290 { ratio / denom } else { ratio };
                z[i] -= w;
                moved = moved.max(w.norm());
            }
            if moved < 1e-14 * (1.0 + radius) {
                break;
            }
        }
        z
    }
}

/// Bivariate polynomial sum c[i][j] z1^i z2^j with complex coefficients.
#[derive(Debug, Clone)]
pub struct BivarPoly {
    pub n1: usize,
    pub n2: usize,
    /// row-major, c[i * n2 + j] multiplies z1^i z2^j
    pub c: Vec<C64>,
}

impl BivarPoly {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        BivarPoly { n1, n2, c: vec![C64::new(0.0, 0.0); n1 * n2] }
    }

    pub fn from_terms(terms: &[(usize, usize, C64)]) -> Self {
        let n1 = terms.iter().map(|t| t.0).max().unwrap_or(0) + 1;
        let n2 = terms.iter().map(|t| t.1).max().unwrap_or(0) + 1;
        let mut p = BivarPoly::zeros(n1, n2);
        for &(i, j, v) in terms {
            p.c[i * n2 + j] += v;
        }
        p
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        if i < self.n1 && j < self.n2 {
            self.c[i * self.n2 + j]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Total degree (max i + j over nonzero terms).
    pub fn total_degree(&self) -> usize {
        let mut d = 0;
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                if self.coeff(i, j).norm() > 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        // Horner in z1 of Horner-in-z2 rows
        let mut s = C64::new(0.0, 0.0);
        for i in (0..self.n1).rev() {
            let mut row = C64::new(0.0, 0.0);
            for j in (0..self.n2).rev() {
                row = row * z2 + self.c[i * self.n2 + j];
            }
            s = s * z1 + row;
        }
        s
    }

    pub fn d1(&self) -> BivarPoly {
        if self.n1 <= 1 {
            return BivarPoly::zeros(1, 1);
        }
        let mut p = BivarPoly::zeros(self.n1 - 1, self.n2);
        for i in 1..self.n1 {
            for j in 0..self.n2 {
                p.c[(i - 1) * self.n2 + j] = self.c[i * self.n2 + j] * i as f64;
            }
        }
        p
    }

    pub fn d2(&self) -> BivarPoly {
        if self.n2 <= 1 {
            return BivarPoly::zeros(1, 1);
        }
        let n2 = self.n2 - 1;
        let mut p = BivarPoly::zeros(self.n1, n2);
        for i in 0..self.n1 {
            for j in 1..self.n2 {
                p.c[i * n2 + (j - 1)] = self.c[i * self.n2 + j] * j as f64;
            }
        }
        p
    }

    /// Linear combination a*self + b*other.
    pub fn lin_comb(&self, a: C64, other: &BivarPoly, b: C64) -> BivarPoly {
        let n1 = self.n1.max(other.n1);
        let n2 = self.n2.max(other.n2);
        let mut p = BivarPoly::zeros(n1, n2);
        for i in 0..n1 {
            for j in 0..n2 {
                p.c[i * n2 + j] = a * self.coeff(i, j) + b * other.coeff(i, j);
            }
        }
        p
    }

    /// Coefficients in z2 at fixed z1 (for univariate root extraction).
    pub fn z2_poly_at(&self, z1: C64) -> CPoly {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.n2];
        for (j, cj) in coeffs.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for i in (0..self.n1).rev() {
                s = s * z1 + self.c[i * self.n2 + j];
            }
            *cj = s;
        }
        CPoly::new(coeffs)
    }

    /// Formal degree in z2 (highest j with any nonzero coefficient).
    pub fn deg_z2(&self) -> usize {
        for j in (0..self.n2).rev() {
            for i in 0..self.n1 {
                if self.coeff(i, j).norm() > 0.0 {
                    return j;
                }
            }
        }
        0
    }

    pub fn deg_z1(&self) -> usize {
        for i in (0..self.n1).rev() {
            for j in 0..self.n2 {
                if self.coeff(i, j).norm() > 0.0 {
                    return i;
                }
            }
        }
        0
    }
}

/// Sylvester resultant of p and q with respect to z2, evaluated at fixed z1.
fn sylvester_det_at(p: &BivarPoly, q: &BivarPoly, mp: usize, mq: usize, z1: C64) -> C64 {
    let pa = p.z2_poly_at(z1);
    let qa = q.z2_poly_at(z1);
    let size = mp + mq;
    if size == 0 {
        return c64(1.0, 0.0);
    }
    let getp = |j: usize| -> C64 {
        if j < pa.coeffs.len() { pa.coeffs[j] } else { C64::new(0.0, 0.0) }
    };
    let getq = |j: usize| -> C64 {
        if j < qa.coeffs.len() { qa.coeffs[j] } else { C64::new(0.0, 0.0) }
    };
    let mut m = CMat::zeros(size, size);
    for r in 0..mq {
        for k in 0..=mp {
            m.set(r, r + k, getp(mp - k));
        }
    }
    for r in 0..mp {
        for k in 0..=mq {
            m.set(mq + r, r + k, getq(mq - k));
        }
    }
    match clu_factor(&m) {
        Ok(f) => f.det(),
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// Resultant of p and q with respect to z2 as a polynomial in z1, computed by
/// evaluation at scaled roots of unity and inverse DFT. Degrees are the
/// formal z2-degrees of the inputs, so the result is the formal resultant.
pub fn resultant_z2(p: &BivarPoly, q: &BivarPoly) -> Result<CPoly> {
    let mp = p.deg_z2();
    let mq = q.deg_z2();
    if mp == 0 && mq == 0 {
        return Err(Error::InvalidArgument("resultant: both inputs constant in z2"));
    }
    let deg_bound = mq * p.deg_z1() + mp * q.deg_z1();
    let n_samples = (deg_bound + 1).next_power_of_two().max(4);
    let rho = 1.17; // sample radius; incommensurate with typical curve scales
    let mut vals = vec![C64::new(0.0, 0.0); n_samples];
    for (k, v) in vals.iter_mut().enumerate() {
        let ang = core::f64::consts::TAU * k as f64 / n_samples as f64;
        let z1 = C64::from_polar(rho, ang);
        *v = sylvester_det_at(p, q, mp, mq, z1);
    }
    // vals[k] = sum_m c_m rho^m e^{+2pi i k m / n}: analysis needs the
    // forward transform scaled by 1/n.
    crate::linalg::fft(&mut vals, false);
    let inv_n = 1.0 / n_samples as f64;
    for v in vals.iter_mut() {
        *v *= inv_n;
    }
    let mut coeffs = vals;
    let mut r = 1.0;
    for c in coeffs.iter_mut() {
        *c /= r;
        r *= rho;
    }
    coeffs.truncate(deg_bound + 1);
    Ok(CPoly::new(coeffs).trimmed())
}
