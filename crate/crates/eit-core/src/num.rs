//! Small numeric helpers: complex alias, deterministic PRNG, summation.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const I: C64 = C64::new(0.0, 1.0);

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// splitmix64: tiny deterministic generator for reproducible sampling.
///
/// The pipeline promises bit-identical outputs for a fixed seed, so the
/// generator is pinned here rather than pulled from a crate whose stream
/// might change between versions.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform point in the annulus r_lo <= |z| <= r_hi.
    pub fn annulus(&mut self, r_lo: f64, r_hi: f64) -> C64 {
        let r2 = self.range(r_lo * r_lo, r_hi * r_hi);
        let t = self.range(0.0, core::f64::consts::TAU);
        C64::from_polar(libm::sqrt(r2), t)
    }
}

/// Kahan-compensated complex sum.
pub fn ksum(values: impl Iterator<Item = C64>) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    let mut c = C64::new(0.0, 0.0);
    for v in values {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// max |a_k| over a complex slice.
pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// l2 norm of a complex slice.
pub fn norm2(v: &[C64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Relative l2 distance between two fields.
pub fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.iter().zip(b) {
        num += (x - y).norm_sqr();
        den += y.norm_sqr();
    }
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    libm::sqrt(num / den)
}

pub fn all_finite(v: &[C64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rng_is_deterministic() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let u = Rng::new(7).uniform();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn annulus_respects_radii() {
        let mut r = Rng::new(3);
        for _ in 0..200 {
            let z = r.annulus(0.5, 2.0);
            assert!(z.norm() >= 0.5 && z.norm() <= 2.0);
        }
    }

    #[test]
    fn rel_l2_basics() {
        let a = [c64(1.0, 0.0), c64(0.0, 1.0)];
        let b = [c64(1.0, 0.0), c64(0.0, 1.0)];
        assert_eq!(rel_l2(&a, &b), 0.0);
    }
}
