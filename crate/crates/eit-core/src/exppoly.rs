//! Exponential polynomials Q(lambda) = sum q_k(lambda, lambda_bar)
//! u^{p_k} e^{lambda a_k - conj(lambda a_k)}, u = lambda/|lambda|, and the
//! epsilon-sup lower-bound scan. The frequencies are the unimodular family
//! produced by the determinant asymptotics, for which the exponent has zero
//! real part and the lower bound is a positive constant floor.

use alloc::vec::Vec;

use crate::num::{C64};
use crate::{Error, Result};

/// Polynomial in (lambda, conj lambda).
#[derive(Debug, Clone)]
pub struct Poly2 {
    /// (power of lambda, power of conj lambda, coefficient)
    pub terms: Vec<(u32, u32, C64)>,
}

impl Poly2 {
    pub fn constant(c: C64) -> Self {
        Poly2 { terms: alloc::vec![(0, 0, c)] }
    }

    pub fn eval(&self, lambda: C64) -> C64 {
        let lb = lambda.conj();
        let mut s = C64::new(0.0, 0.0);
        for &(i, j, c) in &self.terms {
            let mut v = c;
            for _ in 0..i {
                v *= lambda;
            }
            for _ in 0..j {
                v *= lb;
            }
            s += v;
        }
        s
    }
}

/// One term q(lambda) (lambda/|lambda|)^p e^{lambda a - conj(lambda a)}.
#[derive(Debug, Clone)]
pub struct ExpPolyTerm {
    pub coeff: Poly2,
    pub frequency: C64,
    /// power of the unimodular factor lambda/|lambda| (0 for pure terms)
    pub unimodular_power: i32,
}

/// Finite sum of exponential-polynomial terms with the working disk radius
/// for the sup norm.
#[derive(Debug, Clone)]
pub struct ExpPoly {
    pub terms: Vec<ExpPolyTerm>,
    pub epsilon: f64,
}

impl ExpPoly {
    pub fn eval(&self, lambda: C64) -> C64 {
        let r = lambda.norm();
        let u = if r > 0.0 { lambda / r } else { C64::new(1.0, 0.0) };
        let mut s = C64::new(0.0, 0.0);
        for t in &self.terms {
            let arg = lambda * t.frequency - (lambda * t.frequency).conj();
            let mut v = t.coeff.eval(lambda) * arg.exp();
            if t.unimodular_power >= 0 {
                for _ in 0..t.unimodular_power {
                    v *= u;
                }
            } else {
                for _ in 0..(-t.unimodular_power) {
                    v /= u;
                }
            }
            s += v;
        }
        s
    }

    /// h(lambda) = max_k Re(lambda a_k - conj(lambda a_k)); identically zero
    /// for this frequency family, kept literal for the constant estimate.
    pub fn h(&self, lambda: C64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let arg = lambda * t.frequency - (lambda * t.frequency).conj();
                arg.re
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// sup over a dense polar net of the epsilon-disk around lambda.
    pub fn eps_sup(&self, lambda: C64, net: usize) -> f64 {
        let mut best = self.eval(lambda).norm();
        for ir in 1..=net {
            let r = self.epsilon * ir as f64 / net as f64;
            let na = 4 * net;
            for ia in 0..na {
                let ang = core::f64::consts::TAU * ia as f64 / na as f64;
                let lp = lambda + C64::from_polar(r, ang);
                best = best.max(self.eval(lp).norm());
            }
        }
        best
    }
}

/// Scan lambda samples: returns (min over samples of |Q|_eps, C_hat) where
/// C_hat = max over samples of e^{h(lambda)} / |Q|_eps is the implied
/// constant of the lower bound |Q|_eps >= e^{h}/C.
pub fn exppoly_eps_inf(
    expoly: &ExpPoly,
    lambda_samples: &[C64],
    net: usize,
) -> Result<(f64, f64)> {
    if lambda_samples.is_empty() {
        return Err(Error::InvalidArgument("exppoly_eps_inf: empty sample set"));
    }
    let mut min_sup = f64::INFINITY;
    let mut c_hat = 0.0f64;
    for &l in lambda_samples {
        let sup = expoly.eps_sup(l, net);
        min_sup = min_sup.min(sup);
        let e_h = libm::exp(expoly.h(l));
        if sup > 0.0 {
            c_hat = c_hat.max(e_h / sup);
        } else {
            c_hat = f64::INFINITY;
        }
    }
    Ok((min_sup, c_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{c64, Rng};

    #[test]
    fn single_unimodular_term_has_unit_sup() {
        // Q = e^{lambda - conj lambda}: |Q| = 1 everywhere
        let q = ExpPoly {
            terms: alloc::vec![ExpPolyTerm {
                coeff: Poly2::constant(c64(1.0, 0.0)),
                frequency: c64(1.0, 0.0),
                unimodular_power: 0,
            }],
            epsilon: 0.5,
        };
        let samples: Vec<_> = (0..8).map(|k| C64::from_polar(5.0, 0.7 * k as f64)).collect();
        let (min_sup, c_hat) = exppoly_eps_inf(&q, &samples, 8).unwrap();
        assert!((min_sup - 1.0).abs() < 1e-12);
        assert!((c_hat - 1.0).abs() < 1e-12);
        assert_eq!(q.h(c64(3.0, -2.0)), 0.0);
    }

    #[test]
    fn two_term_difference_matches_1d_reduction() {
        // Q = e^{lambda - conj} - e^{-lambda + conj} = 2i sin(2 Im lambda):
        // the eps-sup reduces to a 1d scan over Im lambda
        let q = ExpPoly {
            terms: alloc::vec![
                ExpPolyTerm {
                    coeff: Poly2::constant(c64(1.0, 0.0)),
                    frequency: c64(1.0, 0.0),
                    unimodular_power: 0,
                },
                ExpPolyTerm {
                    coeff: Poly2::constant(c64(-1.0, 0.0)),
                    frequency: c64(-1.0, 0.0),
                    unimodular_power: 0,
                },
            ],
            epsilon: 0.5,
        };
        let mut rng = Rng::new(3);
        for _ in 0..6 {
            let l = c64(rng.range(-4.0, 4.0), rng.range(-4.0, 4.0));
            let sup = q.eps_sup(l, 24);
            // oracle: max of |2 sin(2y)| over y in [Im l - eps, Im l + eps]
            let mut oracle = 0.0f64;
            for k in 0..=4000 {
                let y = l.im - 0.5 + k as f64 / 4000.0;
                oracle = oracle.max(2.0 * libm::fabs(libm::sin(2.0 * y)));
            }
            assert!((sup - oracle).abs() <= 2e-3 * oracle.max(0.5), "sup {sup} vs oracle {oracle}");
            // zeros sit on a lattice line, but the eps-sup keeps a floor
            assert!(sup >= 2.0 * libm::fabs(libm::sin(1.0)) - 0.05);
        }
    }

    #[test]
    fn empty_sample_set_rejected() {
        let q = ExpPoly { terms: alloc::vec![], epsilon: 0.5 };
        assert!(exppoly_eps_inf(&q, &[], 4).is_err());
    }
}
