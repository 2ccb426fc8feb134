//! Special functions backing the Faddeev kernel: exponential integrals for
//! complex argument, the scaled kernel profile `G1`, and Bessel J0/J1 used by
//! the oscillatory-quadrature pole corrections.

use crate::num::{c64, C64, EULER_GAMMA, I};

/// Entire series phi(x) = sum_{n>=1} x^n / (n * n!).
///
/// Related to the exponential integral by phi(x) = -E1(-x) - log(-x) - gamma.
/// Converges for all x. The cancellation amplitude is the largest term,
/// ~ e^|x| / |x|^{3/2}, so the series route is only used inside
/// `e1_series_region`, where that amplitude stays comparable to the result.
pub fn phi_series(x: C64) -> C64 {
    let mut term = c64(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for n in 1..=700 {
        term *= x / n as f64;
        let add = term / n as f64;
        sum += add;
        if add.norm() < 1e-18 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

/// Scaled exponential integral W(y) = e^y E1(y) by the modified Lentz
/// continued fraction. Valid away from the negative real axis; convergence
/// degrades as arg(y) approaches +-pi, so callers route near-cut arguments
/// to `w_scaled_asymptotic`.
fn w_scaled_lentz(y: C64) -> C64 {
    // CF: e^y E1(y) = 1/(y+1 - 1/(y+3 - 4/(y+5 - 9/(y+7 - ...))))
    let tiny = 1e-300;
    let mut fv = y + 1.0;
    if fv.norm() < tiny {
        fv = c64(tiny, 0.0);
    }
    let mut cv = fv;
    let mut dv = C64::new(0.0, 0.0);
    for k in 1..400u32 {
        let a = -((k * k) as f64);
        let b = y + (2 * k + 1) as f64;
        dv = b + a * dv;
        if dv.norm() < tiny {
            dv = c64(tiny, 0.0);
        }
        cv = b + a / cv;
        if cv.norm() < tiny {
            cv = c64(tiny, 0.0);
        }
        dv = 1.0 / dv;
        let delta = cv * dv;
        fv *= delta;
        if (delta - 1.0).norm() < 1e-15 {
            break;
        }
    }
    1.0 / fv
}

/// W(y) = e^y E1(y) from the divergent asymptotic series, truncated at the
/// smallest term. Kept as an independent cross-check of the continued
/// fraction at moderate angles; not used on the production path.
#[cfg(test)]
fn w_scaled_asymptotic(y: C64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    let mut term = 1.0 / y;
    let mut best = term.norm();
    for k in 0..60 {
        sum += term;
        let next = term * (-(k as f64 + 1.0)) / y;
        if next.norm() > best {
            break;
        }
        best = next.norm();
        term = next;
    }
    sum
}

/// e^y E1(y) via the continued fraction. Callers keep y out of the parabolic
/// neighbourhood of the negative real axis (see `e1_series_region`), where
/// the fraction converges slowly; the series route owns that region.
pub fn w_scaled(y: C64) -> C64 {
    w_scaled_lentz(y)
}

/// true where the power series is the relatively accurate route for E1(y):
/// small |y|, plus the parabolic region |y| + Re y <= 16 around the negative
/// real axis where |E1| is exponentially large and the series suffers no net
/// cancellation. The complement is handled by the continued fraction.
fn e1_series_region(y: C64) -> bool {
    y.norm() <= 8.0 || y.norm() + y.re <= 16.0
}

/// E1(y), complex argument, principal branch.
pub fn e1_complex(y: C64) -> C64 {
    if e1_series_region(y) {
        -EULER_GAMMA - y.ln() - phi_series(-y)
    } else {
        (-y).exp() * w_scaled(y)
    }
}

/// Real exponential integral Ei(x), x > 0, by the everywhere-positive series.
pub fn ei(x: f64) -> f64 {
    assert!(x > 0.0, "ei: argument must be positive");
    if x > 700.0 {
        return f64::INFINITY;
    }
    let mut term = 1.0f64;
    let mut sum = 0.0f64;
    for n in 1..=800 {
        term *= x / n as f64;
        let add = term / n as f64;
        sum += add;
        if add < 1e-17 * (1.0 + sum) {
            break;
        }
    }
    EULER_GAMMA + libm::log(x) + sum
}

/// Scaled profile of the Faddeev kernel.
///
/// `g1(x)` is the unique function with
///
/// ```text
/// d/dzbar (d/dz + 1) g1(z) = delta(z) / (2i)        (z in C)
/// g1(z) -> 0 as |z| -> infinity,
/// ```
///
/// and the kernel for general spectral parameter is `g(z, lambda) =
/// g1(lambda * z)`. Representations used:
///
/// * |x| <= 16:  g1 = (i/2pi) e^{-x} * 2(gamma + ln|x| + Re phi(x))
/// * |x|  > 16:  g1 = (i/2pi) [ W(-x) + e^{xbar - x} conj(W(-x)) ]
///
/// both are exact rewritings of (i/pi) e^{-x} Re E1(-x).
pub fn faddeev_g1(x: C64) -> C64 {
    let r = x.norm();
    assert!(r > 0.0, "faddeev_g1: x = 0 is the kernel singularity");
    if e1_series_region(-x) {
        let b = 2.0 * (EULER_GAMMA + libm::log(r) + phi_series(x).re);
        -I / core::f64::consts::TAU * (-x).exp() * b
    } else {
        let w = w_scaled(-x);
        let phase = (x.conj() - x).exp(); // unimodular
        I / core::f64::consts::TAU * (w + phase * w.conj())
    }
}

/// Bessel J0, Abramowitz-Stegun 9.4.1/9.4.3 rational fits (|err| < 1e-7).
pub fn bessel_j0(x: f64) -> f64 {
    let ax = libm::fabs(x);
    if ax < 8.0 {
        let y = x * x;
        let p1 = 57_568_490_574.0
            + y * (-13_362_590_354.0
                + y * (651_619_640.7 + y * (-11_214_424.18 + y * (77_392.33017 + y * (-184.905_245_6)))));
        let p2 = 57_568_490_411.0
            + y * (1_029_532_985.0 + y * (9_494_680.718 + y * (59_272.64853 + y * (267.853_271_2 + y))));
        p1 / p2
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - 0.785_398_163_4;
        let p1 = 1.0
            + y * (-0.109_862_862_7e-2
                + y * (0.273_451_040_7e-4 + y * (-0.207_337_063_9e-5 + y * 0.209_388_721_1e-6)));
        let p2 = -0.156_249_999_5e-1
            + y * (0.143_048_851_9e-3
                + y * (-0.691_114_765_1e-5 + y * (0.762_109_516_1e-6 + y * (-0.934_935_152e-7))));
        libm::sqrt(0.636_619_772 / ax) * (libm::cos(xx) * p1 - z * libm::sin(xx) * p2)
    }
}

/// Bessel J1, Abramowitz-Stegun 9.4.4/9.4.6 rational fits (|err| < 1e-7).
pub fn bessel_j1(x: f64) -> f64 {
    let ax = libm::fabs(x);
    let v = if ax < 8.0 {
        let y = x * x;
        let p1 = x
            * (72_362_614_232.0
                + y * (-7_895_059_235.0
                    + y * (242_396_853.1
                        + y * (-2_972_611.439 + y * (15_704.48260 + y * (-30.160_366_06))))));
        let p2 = 144_725_228_442.0
            + y * (2_300_535_178.0
                + y * (18_583_304.74 + y * (99_447.43394 + y * (376.999_139_7 + y))));
        return p1 / p2;
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - 2.356_194_491;
        let p1 = 1.0
            + y * (0.183_105e-2
                + y * (-0.351_639_64e-4 + y * (0.245_752_017_4e-5 + y * (-0.240_337_019e-6))));
        let p2 = 0.046_874_999_95
            + y * (-0.202_690_873_3e-3
                + y * (0.844_919_920_96e-5 + y * (-0.882_289_87e-6 + y * 0.105_787_412e-6)));
        libm::sqrt(0.636_619_772 / ax) * (libm::cos(xx) * p1 - z * libm::sin(xx) * p2)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}
