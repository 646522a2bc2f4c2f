//! Point estimates of `p` and the plug-in PMF/CDF estimators they induce.
//!
//! * MLE: root of `mean(p) = T/n`, the likelihood equation rewritten in
//!   terms of the mean, which is monotone in `p`.
//! * LSE / WLSE: (weighted) squared distance between `F(x_(j); p)` and the
//!   plotting positions `j/(n+1)`.
//! * PCE: squared distance between `ln(j/(n+1))` and `ln F(x_(j); p)`.
//!
//! Tied observations take the plotting position of the highest rank in
//! their block, which keeps the fits consistent for discrete data.
//!
//! The three order-statistic objectives are minimized by a 64-point grid
//! scan over `(0, 1)` followed by Brent's method inside the two grid cells
//! around the best grid point.

use std::fmt;
use std::str::FromStr;

use crate::dist::{mean_of, LogSeries};
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::optimize::{brent_min, brent_root};
use crate::sample::Sample;

/// Lower end of the search interval for `p`.
pub const P_MIN: f64 = 1e-12;
/// Upper end of the search interval for `p`.
pub const P_MAX: f64 = 1.0 - 1e-12;

const GRID_POINTS: usize = 64;
const MIN_XTOL: f64 = 1e-10;
const MLE_FTOL: f64 = 1e-12;
const MLE_XTOL: f64 = 1e-14;
const MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FitMethod {
    Mle,
    Lse,
    Wlse,
    Pce,
}

impl FitMethod {
    pub const ALL: [FitMethod; 4] = [
        FitMethod::Mle,
        FitMethod::Lse,
        FitMethod::Wlse,
        FitMethod::Pce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FitMethod::Mle => "MLE",
            FitMethod::Lse => "LSE",
            FitMethod::Wlse => "WLSE",
            FitMethod::Pce => "PCE",
        }
    }
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "MLE" => Ok(FitMethod::Mle),
            "LSE" => Ok(FitMethod::Lse),
            "WLSE" => Ok(FitMethod::Wlse),
            "PCE" => Ok(FitMethod::Pce),
            other => Err(Error::Config(format!("unknown fit method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub method: FitMethod,
    pub p_hat: LogSeries,
    /// Objective at `p_hat`; always 0 for the MLE.
    pub objective_value: f64,
    pub iterations: usize,
    /// False for boundary reports (degenerate samples) and searches that hit
    /// the iteration limit.
    pub converged: bool,
}

impl FitResult {
    pub fn p(&self) -> f64 {
        self.p_hat.p()
    }

    /// Plug-in PMF estimate `f(x; p_hat)`.
    pub fn pmf(&self, x: u64) -> f64 {
        self.p_hat.pmf(x)
    }

    /// Plug-in CDF estimate `F(x; p_hat)`.
    pub fn cdf(&self, x: u64) -> f64 {
        self.p_hat.cdf(x)
    }
}

pub fn plugin_pmf(fit: &FitResult, x: u64) -> f64 {
    fit.pmf(x)
}

pub fn plugin_cdf(fit: &FitResult, x: u64) -> f64 {
    fit.cdf(x)
}

/// Sample sorted ascending, ties kept as repeated entries.
///
/// Each entry carries an effective rank: the highest rank `j` within its
/// block of ties, so that `j / (n+1)` is the empirical CDF at that value
/// scaled by `n/(n+1)`. Untied entries keep their own rank.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample {
    sorted: Vec<u64>,
    ranks: Vec<usize>,
}

impl OrderedSample {
    pub fn new(sample: &Sample) -> Self {
        let mut sorted = sample.values().to_vec();
        sorted.sort_unstable();
        let mut ranks = vec![0; sorted.len()];
        let mut end = sorted.len();
        for i in (0..sorted.len()).rev() {
            if i + 1 < sorted.len() && sorted[i] != sorted[i + 1] {
                end = i + 1;
            }
            ranks[i] = end;
        }
        Self { sorted, ranks }
    }

    /// Effective 1-based rank of each sorted entry.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `(n+1)^2 (n+2) / (j (n-j+1))`, the reciprocal of `Var F(X_(j))`.
    pub fn weight(n: usize, j: usize) -> f64 {
        let (n, j) = (n as f64, j as f64);
        (n + 1.0) * (n + 1.0) * (n + 2.0) / (j * (n - j + 1.0))
    }

    pub fn sorted(&self) -> &[u64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `j / (n+1)` at each entry's effective rank.
    pub fn plotting_positions(&self) -> Vec<f64> {
        let n1 = (self.len() + 1) as f64;
        self.ranks.iter().map(|&j| j as f64 / n1).collect()
    }

    /// WLSE weights at each entry's effective rank.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.len();
        self.ranks.iter().map(|&j| Self::weight(n, j)).collect()
    }

    /// `F(x_(j); p)` for every rank, in one pass over the support.
    pub fn fitted_cdf(&self, dist: &LogSeries) -> Vec<f64> {
        let p = dist.p();
        let ratio = p / (1.0 - p);
        let mut out = Vec::with_capacity(self.sorted.len());
        let mut acc = KahanSum::new();
        let mut w = 0u64;
        let mut saturated = false;
        for &x in &self.sorted {
            while !saturated && w < x {
                w += 1;
                let term = dist.pmf(w);
                acc.add(term);
                if term * ratio < 1e-17 * acc.value() {
                    saturated = true;
                }
            }
            out.push(acc.value().min(1.0));
        }
        out
    }
}

/// The order-statistic objectives, evaluated at any `p` in `(0, 1)`.
#[derive(Debug, Clone)]
pub struct Objective<'a> {
    kind: ObjectiveKind,
    ordered: &'a OrderedSample,
    weights: Vec<f64>,
    targets: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ObjectiveKind {
    Squares,
    LogSquares,
}

impl<'a> Objective<'a> {
    pub fn lse(ordered: &'a OrderedSample) -> Self {
        Self::weighted(ordered, vec![1.0; ordered.len()])
    }

    pub fn wlse(ordered: &'a OrderedSample) -> Self {
        Self::weighted(ordered, ordered.weights())
    }

    /// Least squares with caller-supplied weights, one per rank.
    pub fn weighted(ordered: &'a OrderedSample, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), ordered.len(), "one weight per rank");
        Self {
            kind: ObjectiveKind::Squares,
            ordered,
            weights,
            targets: ordered.plotting_positions(),
        }
    }

    pub fn pce(ordered: &'a OrderedSample) -> Self {
        Self {
            kind: ObjectiveKind::LogSquares,
            ordered,
            weights: vec![1.0; ordered.len()],
            targets: ordered
                .plotting_positions()
                .into_iter()
                .map(f64::ln)
                .collect(),
        }
    }

    pub fn for_method(method: FitMethod, ordered: &'a OrderedSample) -> Option<Self> {
        match method {
            FitMethod::Mle => None,
            FitMethod::Lse => Some(Self::lse(ordered)),
            FitMethod::Wlse => Some(Self::wlse(ordered)),
            FitMethod::Pce => Some(Self::pce(ordered)),
        }
    }

    /// Objective value at `p`; `+inf` outside `(0, 1)`.
    pub fn eval(&self, p: f64) -> f64 {
        let Ok(dist) = LogSeries::new(p) else {
            return f64::INFINITY;
        };
        let fitted = self.ordered.fitted_cdf(&dist);
        let mut acc = KahanSum::new();
        for ((&f, &target), &w) in fitted.iter().zip(&self.targets).zip(&self.weights) {
            let r = match self.kind {
                ObjectiveKind::Squares => f - target,
                ObjectiveKind::LogSquares => target - f.ln(),
            };
            acc.add(w * r * r);
        }
        acc.value()
    }

    /// Grid scan then Brent refinement.
    pub fn minimize(&self) -> (f64, f64, usize, bool) {
        let step = 1.0 / (GRID_POINTS + 1) as f64;
        let grid: Vec<f64> = (0..=GRID_POINTS + 1)
            .map(|i| match i {
                0 => P_MIN,
                i if i == GRID_POINTS + 1 => P_MAX,
                i => i as f64 * step,
            })
            .collect();
        let (best, _) = (1..=GRID_POINTS).map(|i| (i, self.eval(grid[i]))).fold(
            (1, f64::INFINITY),
            |acc, cur| if cur.1 < acc.1 { cur } else { acc },
        );
        let m = brent_min(
            |p| self.eval(p),
            grid[best - 1],
            grid[best + 1],
            grid[best],
            MIN_XTOL,
            MAX_ITER,
        );
        (m.x, m.fx, m.iterations, m.converged)
    }
}

/// Maximum likelihood estimate of `p`.
///
/// A sample of all ones (`T = n`) has no interior maximum; it is reported at
/// `P_MIN` with `converged = false`.
pub fn fit_mle(sample: &Sample) -> FitResult {
    let target = sample.mean();
    let boundary = |p: f64| FitResult {
        method: FitMethod::Mle,
        p_hat: LogSeries::new(p).expect("boundary inside (0,1)"),
        objective_value: 0.0,
        iterations: 0,
        converged: false,
    };
    if sample.total() == sample.len() as u64 {
        return boundary(P_MIN);
    }
    let g = |p: f64| mean_of(p) - target;
    if g(P_MIN) >= 0.0 {
        return boundary(P_MIN);
    }
    if g(P_MAX) <= 0.0 {
        return boundary(P_MAX);
    }
    let root = brent_root(g, P_MIN, P_MAX, MLE_FTOL, MLE_XTOL, MAX_ITER);
    FitResult {
        method: FitMethod::Mle,
        p_hat: LogSeries::new(root.x.clamp(P_MIN, P_MAX)).expect("root inside (0,1)"),
        objective_value: 0.0,
        iterations: root.iterations,
        converged: root.converged,
    }
}

fn require_two(sample: &Sample, method: FitMethod) -> Result<()> {
    if sample.len() < 2 {
        return Err(Error::SampleTooSmall {
            method: method.name(),
            required: 2,
            got: sample.len(),
        });
    }
    Ok(())
}

fn finish(method: FitMethod, objective: &Objective<'_>) -> FitResult {
    let (p, value, iterations, converged) = objective.minimize();
    FitResult {
        method,
        p_hat: LogSeries::new(p.clamp(P_MIN, P_MAX)).expect("minimizer inside (0,1)"),
        objective_value: value,
        iterations,
        converged,
    }
}

pub fn fit_lse(sample: &Sample) -> Result<FitResult> {
    require_two(sample, FitMethod::Lse)?;
    let ordered = OrderedSample::new(sample);
    Ok(finish(FitMethod::Lse, &Objective::lse(&ordered)))
}

pub fn fit_wlse(sample: &Sample) -> Result<FitResult> {
    require_two(sample, FitMethod::Wlse)?;
    let ordered = OrderedSample::new(sample);
    Ok(finish(FitMethod::Wlse, &Objective::wlse(&ordered)))
}

/// WLSE with explicit per-rank weights instead of the reciprocal variances.
pub fn fit_wlse_with_weights(sample: &Sample, weights: Vec<f64>) -> Result<FitResult> {
    require_two(sample, FitMethod::Wlse)?;
    let ordered = OrderedSample::new(sample);
    Ok(finish(
        FitMethod::Wlse,
        &Objective::weighted(&ordered, weights),
    ))
}

pub fn fit_pce(sample: &Sample) -> Result<FitResult> {
    require_two(sample, FitMethod::Pce)?;
    let ordered = OrderedSample::new(sample);
    Ok(finish(FitMethod::Pce, &Objective::pce(&ordered)))
}

pub fn fit(method: FitMethod, sample: &Sample) -> Result<FitResult> {
    match method {
        FitMethod::Mle => Ok(fit_mle(sample)),
        FitMethod::Lse => fit_lse(sample),
        FitMethod::Wlse => fit_wlse(sample),
        FitMethod::Pce => fit_pce(sample),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[u64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn wlse_weights_for_three() {
        let o = OrderedSample::new(&sample(&[3, 1, 2]));
        let w = o.weights();
        assert!((w[0] - 80.0 / 3.0).abs() < 1e-12);
        assert!((w[1] - 20.0).abs() < 1e-12);
        assert!((w[2] - 80.0 / 3.0).abs() < 1e-12);
        assert_eq!(o.sorted(), &[1, 2, 3]);
        assert_eq!(o.plotting_positions(), vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn ties_share_the_highest_rank() {
        let o = OrderedSample::new(&sample(&[2, 1, 1, 5, 2, 1]));
        assert_eq!(o.sorted(), &[1, 1, 1, 2, 2, 5]);
        assert_eq!(o.ranks(), &[3, 3, 3, 5, 5, 6]);
        assert!((o.plotting_positions()[0] - 3.0 / 7.0).abs() < 1e-15);
        assert!((o.weights()[3] - OrderedSample::weight(6, 5)).abs() < 1e-12);
    }

    #[test]
    fn mle_inverts_the_mean() {
        let m = LogSeries::new(0.5).unwrap().mean();
        let g = |p: f64| mean_of(p) - m;
        let root = brent_root(g, P_MIN, P_MAX, 1e-12, 1e-14, 500);
        assert!((root.x - 0.5).abs() < 1e-10);

        let fit = fit_mle(&sample(&[1, 1, 2]));
        assert!(fit.converged);
        assert!((mean_of(fit.p()) - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn mle_all_ones_is_a_boundary_report() {
        let fit = fit_mle(&sample(&[1, 1, 1, 1]));
        assert!(!fit.converged);
        assert_eq!(fit.p(), P_MIN);
        assert_eq!(fit.iterations, 0);
    }

    #[test]
    fn least_squares_need_two_points() {
        let s = sample(&[4]);
        assert!(matches!(fit_lse(&s), Err(Error::SampleTooSmall { .. })));
        assert!(matches!(fit_wlse(&s), Err(Error::SampleTooSmall { .. })));
        assert!(matches!(fit_pce(&s), Err(Error::SampleTooSmall { .. })));
    }

    #[test]
    fn lse_dominates_the_percent_grid() {
        let s = sample(&[1, 1, 2]);
        let fit = fit_lse(&s).unwrap();
        let o = OrderedSample::new(&s);
        let obj = Objective::lse(&o);
        assert!((obj.eval(fit.p()) - fit.objective_value).abs() < 1e-15);
        for i in 1..=99 {
            assert!(fit.objective_value <= obj.eval(i as f64 / 100.0));
        }
    }

    #[test]
    fn unit_weights_reproduce_lse() {
        let s = sample(&[1, 3, 1, 2, 7, 1, 1, 4]);
        let lse = fit_lse(&s).unwrap();
        let unit = fit_wlse_with_weights(&s, vec![1.0; s.len()]).unwrap();
        assert!((lse.p() - unit.p()).abs() < 1e-9);
    }

    #[test]
    fn pce_matches_fine_grid() {
        let s = sample(&[2, 2]);
        let fit = fit_pce(&s).unwrap();
        assert!(fit.objective_value >= 0.0);
        let o = OrderedSample::new(&s);
        let obj = Objective::pce(&o);
        let (best, _) = (1..10_000)
            .map(|i| {
                let p = i as f64 / 10_000.0;
                (p, obj.eval(p))
            })
            .fold((0.0, f64::INFINITY), |a, c| if c.1 < a.1 { c } else { a });
        assert!((fit.p() - best).abs() < 1e-3, "fit={} grid={best}", fit.p());
    }

    #[test]
    fn perfect_fit_reaches_zero() {
        // Only the first entry counts; both share rank 2, and F(1; p) = 2/3 has an interior root,
        // so the objective's lower bound of zero is attainable.
        let s = sample(&[1, 1]);
        let o = OrderedSample::new(&s);
        let obj = Objective::weighted(&o, vec![1.0, 0.0]);
        let fit = finish(FitMethod::Lse, &obj);
        assert!(fit.objective_value < 1e-20);
        assert!((fit.cdf(1) - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn plugin_values() {
        let fit = FitResult {
            method: FitMethod::Lse,
            p_hat: LogSeries::new(0.6).unwrap(),
            objective_value: 0.0,
            iterations: 0,
            converged: true,
        };
        assert!((plugin_pmf(&fit, 12) - 1.979_704_930_868_095e-4).abs() < 1e-17);
        assert_eq!(plugin_cdf(&fit, 1), plugin_pmf(&fit, 1));
        for x in 1..20 {
            let (f, c) = (plugin_pmf(&fit, x), plugin_cdf(&fit, x));
            assert!((0.0..=1.0).contains(&f) && (0.0..=1.0).contains(&c));
            assert!(c >= f);
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in FitMethod::ALL {
            assert_eq!(m.name().parse::<FitMethod>().unwrap(), m);
        }
        assert!("wlse".parse::<FitMethod>().is_ok());
        assert!("BAYES".parse::<FitMethod>().is_err());
    }
}
