//! Uniformly minimum variance unbiased estimators of `f(x)` and `F(x)`.
//!
//! Conditioning the indicator `1{X_1 = x}` on the complete sufficient
//! statistic `T = t` gives
//!
//! ```text
//! f^(x) = |s(t-x, n-1)| t! / (n x |s(t,n)| (t-x)!)
//! ```
//!
//! which is nonzero only for `1 <= x <= t-n+1`: the other `n-1`
//! observations are each at least 1, so they need `t - x >= n - 1`.
//! `F^(x)` is the running sum of `f^(w)` over `w = 1..=x`.
//!
//! The variances are exact moments over the law of `T`, truncated where the
//! remaining mass of `T` drops below `eps`.

use crate::dist::LogSeries;
use crate::error::Result;
use crate::numeric::KahanSum;
use crate::sample::Sample;
use crate::stirling::{LogStirlingTable, Sdfk, StirlingView};

/// Default truncation tolerance for the variance series.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Relative size of a negative `E[Y^2] - E[Y]^2` above which the clamp is flagged.
const CANCELLATION_WARN: f64 = 1e-6;

/// `ln f^(x)` given `(n, t)`; `-inf` outside `1..=t-n+1`.
#[inline]
pub(crate) fn ln_umvue_pmf_in(view: &StirlingView<'_>, n: usize, t: u64, x: u64) -> f64 {
    if x == 0 || n == 0 || x > t || t - x < (n - 1) as u64 {
        return f64::NEG_INFINITY;
    }
    let (t, x) = (t as usize, x as usize);
    let rest = t - x;
    -(n as f64).ln() - (x as f64).ln() + view.ln_stirling(rest, n - 1) - view.ln_stirling(t, n)
        + view.ln_factorial(t)
        - view.ln_factorial(rest)
}

#[inline]
pub(crate) fn umvue_cdf_in(view: &StirlingView<'_>, n: usize, t: u64, x: u64) -> f64 {
    if x == 0 {
        return 0.0;
    }
    // the whole conditional support is covered
    if x + n as u64 > t {
        return 1.0;
    }
    let acc: KahanSum = (1..=x)
        .map(|w| ln_umvue_pmf_in(view, n, t, w).exp())
        .collect();
    acc.value().clamp(0.0, 1.0)
}

/// `f^(x)` for a sample of size `n` with total `t`.
pub fn umvue_pmf_given(n: usize, t: u64, x: u64, table: &LogStirlingTable) -> Result<f64> {
    if n == 0 || t < n as u64 {
        return Ok(0.0);
    }
    let view = table.view(t as usize, n)?;
    Ok(ln_umvue_pmf_in(&view, n, t, x).exp())
}

/// `F^(x)` for a sample of size `n` with total `t`.
pub fn umvue_cdf_given(n: usize, t: u64, x: u64, table: &LogStirlingTable) -> Result<f64> {
    if n == 0 || t < n as u64 {
        return Ok(0.0);
    }
    let view = table.view(t as usize, n)?;
    Ok(umvue_cdf_in(&view, n, t, x))
}

pub fn umvue_pmf(sample: &Sample, x: u64, table: &LogStirlingTable) -> Result<f64> {
    umvue_pmf_given(sample.len(), sample.total(), x, table)
}

pub fn umvue_cdf(sample: &Sample, x: u64, table: &LogStirlingTable) -> Result<f64> {
    umvue_cdf_given(sample.len(), sample.total(), x, table)
}

/// An exact variance with the outcome of the cancellation clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variance {
    pub value: f64,
    /// `E[Y]` over the truncated law; equals the estimand up to truncation.
    pub mean: f64,
    /// `E[Y^2] - E[Y]^2` came out negative by more than 1e-6 of `E[Y^2]`.
    pub cancellation_warning: bool,
}

impl Variance {
    fn from_moments(m1: f64, m2: f64) -> Self {
        let raw = m2 - m1 * m1;
        let cancellation_warning = raw < 0.0 && -raw > CANCELLATION_WARN * m2;
        if cancellation_warning {
            log::warn!("variance cancellation: E[Y^2]={m2:e}, E[Y]^2={:e}", m1 * m1);
        }
        Self {
            value: raw.max(0.0),
            mean: m1,
            cancellation_warning,
        }
    }
}

/// `Var(f^(x))` for samples of size `n` drawn with parameter `p`.
pub fn umvue_pmf_variance(
    n: usize,
    dist: LogSeries,
    x: u64,
    table: &LogStirlingTable,
    eps: f64,
) -> Result<Variance> {
    let sdfk = Sdfk::new(n, dist)?;
    let cut = sdfk.tail_cutoff(eps, table)?;
    let view = table.view(cut, n)?;
    let start = (x as usize + n - 1).max(n);
    let mut m1 = KahanSum::new();
    let mut m2 = KahanSum::new();
    for t in start..=cut {
        let ln_g = sdfk.ln_pmf_in(&view, t);
        let ln_f = ln_umvue_pmf_in(&view, n, t as u64, x);
        m1.add((ln_f + ln_g).exp());
        m2.add((2.0 * ln_f + ln_g).exp());
    }
    Ok(Variance::from_moments(m1.value(), m2.value()))
}

/// `Var(F^(x))` for samples of size `n` drawn with parameter `p`.
pub fn umvue_cdf_variance(
    n: usize,
    dist: LogSeries,
    x: u64,
    table: &LogStirlingTable,
    eps: f64,
) -> Result<Variance> {
    let sdfk = Sdfk::new(n, dist)?;
    let cut = sdfk.tail_cutoff(eps, table)?;
    let view = table.view(cut, n)?;
    let mut m1 = KahanSum::new();
    let mut m2 = KahanSum::new();
    if x > 0 {
        for t in n..=cut {
            let g = sdfk.ln_pmf_in(&view, t).exp();
            let big_f = umvue_cdf_in(&view, n, t as u64, x);
            m1.add(big_f * g);
            m2.add(big_f * big_f * g);
        }
    }
    Ok(Variance::from_moments(m1.value(), m2.value()))
}
