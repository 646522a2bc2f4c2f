//! The logarithmic series distribution on `{1, 2, ...}`.
//!
//! Mass function `f(x) = -p^x / (x ln(1-p))`. Every probability is formed in
//! log space, `exp(x ln p - ln x - ln(-ln(1-p)))`, so large `x` never
//! underflows an intermediate power.

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Relative tolerance of the geometric tail rule used for series over the support.
pub const TAIL_REL_TOL: f64 = 1e-14;

/// A logarithmic series law with parameter `0 < p < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSeries {
    p: f64,
    ln_p: f64,
    /// `ln(-ln(1-p))`, the log normalizer.
    ln_norm: f64,
}

impl LogSeries {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParam(p));
        }
        let neg_ln_q = -(-p).ln_1p();
        Ok(Self {
            p,
            ln_p: p.ln(),
            ln_norm: neg_ln_q.ln(),
        })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn ln_p(&self) -> f64 {
        self.ln_p
    }

    /// `ln(-ln(1-p))`.
    #[inline]
    pub fn ln_normalizer(&self) -> f64 {
        self.ln_norm
    }

    /// Log mass at `x`; `-inf` for `x = 0`.
    #[inline]
    pub fn ln_pmf(&self, x: u64) -> f64 {
        if x == 0 {
            return f64::NEG_INFINITY;
        }
        let xf = x as f64;
        xf * self.ln_p - xf.ln() - self.ln_norm
    }

    #[inline]
    pub fn pmf(&self, x: u64) -> f64 {
        self.ln_pmf(x).exp()
    }

    /// `P(X <= x)`. Summation stops early once the geometric bound on the
    /// remaining terms falls below double precision of the running total.
    pub fn cdf(&self, x: u64) -> f64 {
        let mut acc = KahanSum::new();
        let ratio = self.p / (1.0 - self.p);
        for w in 1..=x {
            let term = self.pmf(w);
            acc.add(term);
            if term * ratio < 1e-17 * acc.value() {
                break;
            }
        }
        acc.value().min(1.0)
    }

    /// CDF values at `1..=x_max`; entry `i` holds `F(i + 1)`.
    pub fn cdf_table(&self, x_max: u64) -> Vec<f64> {
        let mut acc = KahanSum::new();
        (1..=x_max)
            .map(|w| {
                acc.add(self.pmf(w));
                acc.value().min(1.0)
            })
            .collect()
    }

    /// `E[X] = p / ((1-p) (-ln(1-p)))`.
    pub fn mean(&self) -> f64 {
        mean_of(self.p)
    }

    /// Smallest `x` with `cdf(x) >= u`.
    pub fn quantile(&self, u: f64) -> u64 {
        let mut acc = KahanSum::new();
        let mut x = 0u64;
        loop {
            x += 1;
            let term = self.pmf(x);
            let before = acc.value();
            acc.add(term);
            if acc.value() >= u {
                return x;
            }
            // saturated below u: nothing further is representable
            if acc.value() == before && term < f64::EPSILON * before {
                return x;
            }
        }
    }

    /// Truncation point of the geometric tail rule: the smallest `X*` with
    /// `f(X*) p / (1-p) < rel_tol * F(X*)`. The omitted mass beyond `X*` is at
    /// most `f(X*) p / (1-p)`.
    pub fn tail_cutoff(&self, rel_tol: f64) -> u64 {
        let ratio = self.p / (1.0 - self.p);
        let mut acc = KahanSum::new();
        let mut x = 0u64;
        loop {
            x += 1;
            let term = self.pmf(x);
            acc.add(term);
            if term * ratio < rel_tol * acc.value() {
                return x;
            }
        }
    }

    /// Smallest `X*` whose accumulated mass exceeds `1 - eps`.
    pub fn mass_cutoff(&self, eps: f64) -> u64 {
        let target = 1.0 - eps;
        let mut acc = KahanSum::new();
        let mut x = 0u64;
        loop {
            x += 1;
            acc.add(self.pmf(x));
            if acc.value() > target {
                return x;
            }
        }
    }

    /// One draw by Kemp's chop-down inversion: subtract successive masses
    /// from a uniform variate, stepping `f(x+1) = f(x) p x / (x+1)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut u: f64 = rng.random();
        let mut x = 1u64;
        let mut prob = self.pmf(1);
        while u > prob {
            u -= prob;
            let xf = x as f64;
            prob *= self.p * xf / (xf + 1.0);
            x += 1;
            if prob == 0.0 {
                break;
            }
        }
        x
    }

    /// `n` draws from a generator seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_iter(&mut rng).take(n).collect()
    }
}

impl Distribution<u64> for LogSeries {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.draw(rng)
    }
}

/// Mean of the law as a plain function of `p`; tends to 1 as `p -> 0`.
pub fn mean_of(p: f64) -> f64 {
    let neg_ln_q = -(-p).ln_1p();
    p / ((1.0 - p) * neg_ln_q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_pmf(p: f64, x: u64) -> f64 {
        -1.0 / (1.0 - p).ln() * p.powi(x as i32) / x as f64
    }

    #[test]
    fn rejects_boundary_and_exterior() {
        for p in [0.0, 1.0, -0.1, 1.2, f64::NAN] {
            assert!(LogSeries::new(p).is_err(), "p = {p}");
        }
    }

    #[test]
    fn pmf_reference_values() {
        let d = LogSeries::new(0.5).unwrap();
        assert!((d.pmf(1) - 0.5 / 2f64.ln()).abs() < 1e-15);
        assert!((d.pmf(1) - 0.721348).abs() < 1e-6);
        let d = LogSeries::new(0.6).unwrap();
        assert!((d.pmf(12) - 1.979_704_930_868_095e-4).abs() < 1e-17);
        assert_eq!(d.pmf(0), 0.0);
    }

    #[test]
    fn log_space_matches_direct_arithmetic() {
        for p in [0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let d = LogSeries::new(p).unwrap();
            for x in 1..=60u64 {
                let direct = direct_pmf(p, x);
                if direct < 1e-290 {
                    continue;
                }
                let rel = (d.pmf(x) - direct).abs() / direct;
                assert!(rel < 1e-13, "p={p} x={x} rel={rel}");
            }
        }
    }

    #[test]
    fn cdf_edges() {
        let d = LogSeries::new(0.5).unwrap();
        assert_eq!(d.cdf(1), d.pmf(1));
        assert!((d.cdf(50) - 1.0).abs() < 1e-12);
        assert_eq!(d.cdf(0), 0.0);
        let table = d.cdf_table(30);
        for x in 1..=30u64 {
            assert!((table[x as usize - 1] - d.cdf(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn mean_values() {
        // p = 1/2 gives mean 1/ln 2
        assert!((LogSeries::new(0.5).unwrap().mean() - std::f64::consts::LOG2_E).abs() < 1e-15);
        assert!((LogSeries::new(0.6).unwrap().mean() - 1.637_035_001_905_937).abs() < 1e-14);
        assert!((mean_of(1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quantile_matches_linear_scan() {
        let d = LogSeries::new(0.5).unwrap();
        assert_eq!(d.quantile(0.5), 1);
        for p in [0.1, 0.6, 0.9] {
            let d = LogSeries::new(p).unwrap();
            assert_eq!(d.quantile(0.5 * d.pmf(1)), 1);
            for u in [0.2, 0.5, 0.9, 0.99, 0.999] {
                // oracle: direct-arithmetic cumulative sum
                let mut s = 0.0;
                let mut x = 0u64;
                while s < u {
                    x += 1;
                    s += direct_pmf(p, x);
                }
                assert_eq!(d.quantile(u), x, "p={p} u={u}");
            }
        }
    }

    #[test]
    fn tail_rule_covers_mass() {
        for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let d = LogSeries::new(p).unwrap();
            let cut = d.tail_cutoff(TAIL_REL_TOL);
            let partial: KahanSum = (1..=cut).map(|x| d.pmf(x)).collect();
            let bound = d.pmf(cut) * p / (1.0 - p);
            assert!(partial.value() + bound >= 1.0 - 1e-12, "p={p}");
            assert!(partial.value() <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_in_support() {
        let d = LogSeries::new(0.6).unwrap();
        let a = d.sample(500, 42);
        let b = d.sample(500, 42);
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| v >= 1));
        assert_ne!(a, d.sample(500, 43));
    }

    #[test]
    fn sampler_frequency_of_one() {
        let d = LogSeries::new(0.6).unwrap();
        let f1 = d.pmf(1);
        assert!((f1 - 0.654814).abs() < 1e-6);
        let n = 1000;
        let draws = d.sample(n, 2024);
        let freq = draws.iter().filter(|&&v| v == 1).count() as f64 / n as f64;
        let sigma = (f1 * (1.0 - f1) / n as f64).sqrt();
        assert!((freq - f1).abs() < 3.0 * sigma, "freq={freq}");
    }

    #[test]
    fn sampler_tiny_p_gives_ones() {
        let d = LogSeries::new(0.001).unwrap();
        assert!(1.0 - d.pmf(1) < 6e-4);
        let draws = d.sample(100, 5);
        assert!(draws.iter().filter(|&&v| v >= 2).count() <= 1);
    }
}
