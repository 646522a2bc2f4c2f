//! Monte Carlo comparison of the five PMF/CDF estimators.
//!
//! Every requested estimator sees the same sample in a given replication.
//! Replication `r` at sample size `n` draws from its own stream
//! (see [`crate::rng`]), and per-replication errors are reduced in index
//! order, so results are bit-identical for any worker count.

use std::fmt;
use std::str::FromStr;

use rand::distr::Distribution;
use rayon::prelude::*;

use crate::dist::LogSeries;
use crate::error::{Error, Result};
use crate::fit::{fit, FitMethod};
use crate::numeric::KahanSum;
use crate::rng::replication_rng;
use crate::sample::Sample;
use crate::stirling::LogStirlingTable;
use crate::umvue::{umvue_cdf, umvue_cdf_variance, umvue_pmf, umvue_pmf_variance, DEFAULT_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    Umvue,
    Fit(FitMethod),
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::Umvue,
        Estimator::Fit(FitMethod::Mle),
        Estimator::Fit(FitMethod::Lse),
        Estimator::Fit(FitMethod::Wlse),
        Estimator::Fit(FitMethod::Pce),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Umvue => "UMVUE",
            Estimator::Fit(m) => m.name(),
        }
    }

    /// Smallest sample size the estimator accepts.
    pub fn min_sample_size(self) -> usize {
        match self {
            Estimator::Umvue | Estimator::Fit(FitMethod::Mle) => 1,
            Estimator::Fit(_) => 2,
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("UMVUE") {
            return Ok(Estimator::Umvue);
        }
        s.parse::<FitMethod>()
            .map(Estimator::Fit)
            .map_err(|_| Error::Config(format!("unknown method `{}`", s.trim())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub p_true: LogSeries,
    pub x_eval: u64,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    /// Truncation tolerance for exact UMVUE variances.
    pub eps: f64,
    pub methods: Vec<Estimator>,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
}

impl Default for StudyConfig {
    /// `p = 0.6`, `x = 12`, 1000 replications, all five estimators.
    fn default() -> Self {
        Self {
            p_true: LogSeries::new(0.6).expect("valid default"),
            x_eval: 12,
            sample_sizes: vec![20, 50, 100, 200, 500],
            replications: 1000,
            seed: 20_190_601,
            eps: DEFAULT_EPS,
            methods: Estimator::ALL.to_vec(),
            threads: 0,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::Config("at least one sample size is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.x_eval == 0 {
            return Err(Error::Config("evaluation point x must be >= 1".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Config(format!(
                "eps must be in (0,1), got {}",
                self.eps
            )));
        }
        let need = self
            .methods
            .iter()
            .map(|m| m.min_sample_size())
            .max()
            .unwrap_or(1);
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < need) {
            return Err(Error::Config(format!(
                "sample size {n} is below the minimum {need} for the requested methods"
            )));
        }
        Ok(())
    }
}

/// The sample used by replication `r` at size `n`.
pub fn draw_replication(config: &StudyConfig, n: usize, r: usize) -> Sample {
    let mut rng = replication_rng(config.seed, n, r);
    let values: Vec<u64> = config.p_true.sample_iter(&mut rng).take(n).collect();
    Sample::new(values).expect("draws are in the support")
}

/// One estimator's output on one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub pmf: f64,
    pub cdf: f64,
    /// The underlying fit did not converge; the estimate is its boundary value.
    pub failed: bool,
}

pub fn estimate(
    method: Estimator,
    sample: &Sample,
    x: u64,
    table: &LogStirlingTable,
) -> Result<Estimate> {
    match method {
        Estimator::Umvue => Ok(Estimate {
            pmf: umvue_pmf(sample, x, table)?,
            cdf: umvue_cdf(sample, x, table)?,
            failed: false,
        }),
        Estimator::Fit(m) => {
            let fitted = fit(m, sample)?;
            Ok(Estimate {
                pmf: fitted.pmf(x),
                cdf: fitted.cdf(x),
                failed: !fitted.converged,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub method: Estimator,
    pub n: usize,
    pub replications: usize,
    pub mse_pmf: f64,
    pub mse_cdf: f64,
    pub bias_pmf: f64,
    pub bias_cdf: f64,
    pub mean_pmf: f64,
    pub mean_cdf: f64,
    /// Monte Carlo standard errors of the two MSEs.
    pub se_mse_pmf: f64,
    pub se_mse_cdf: f64,
    pub failure_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub true_pmf: f64,
    pub true_cdf: f64,
    /// Ordered by sample size, then by method in config order.
    pub cells: Vec<CellStats>,
}

impl SimulationResult {
    pub fn cell(&self, method: Estimator, n: usize) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.method == method && c.n == n)
    }
}

#[derive(Default)]
struct Moments {
    e: KahanSum,
    e2: KahanSum,
    e4: KahanSum,
    est: KahanSum,
}

impl Moments {
    fn push(&mut self, estimate: f64, truth: f64) {
        let err = estimate - truth;
        self.e.add(err);
        self.e2.add(err * err);
        self.e4.add(err * err * err * err);
        self.est.add(estimate);
    }

    /// (mse, bias, mean estimate, standard error of mse)
    fn finish(&self, reps: usize) -> (f64, f64, f64, f64) {
        let r = reps as f64;
        let mse = self.e2.value() / r;
        let bias = self.e.value() / r;
        let mean = self.est.value() / r;
        let se = if reps > 1 {
            let var_sq = (self.e4.value() / r - mse * mse).max(0.0) * r / (r - 1.0);
            (var_sq / r).sqrt()
        } else {
            0.0
        };
        (mse, bias, mean, se)
    }
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

pub fn run_study(config: &StudyConfig, table: &LogStirlingTable) -> Result<SimulationResult> {
    config.validate()?;
    let x = config.x_eval;
    let true_pmf = config.p_true.pmf(x);
    let true_cdf = config.p_true.cdf(x);
    let mut cells = Vec::with_capacity(config.sample_sizes.len() * config.methods.len());

    for &n in &config.sample_sizes {
        let per_rep: Vec<Vec<Estimate>> = with_pool(config.threads, || {
            (0..config.replications)
                .into_par_iter()
                .map(|r| {
                    let sample = draw_replication(config, n, r);
                    config
                        .methods
                        .iter()
                        .map(|&m| estimate(m, &sample, x, table))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })??;

        for (k, &method) in config.methods.iter().enumerate() {
            let mut pmf = Moments::default();
            let mut cdf = Moments::default();
            let mut failures = 0;
            for rep in &per_rep {
                let est = rep[k];
                pmf.push(est.pmf, true_pmf);
                cdf.push(est.cdf, true_cdf);
                failures += usize::from(est.failed);
            }
            let (mse_pmf, bias_pmf, mean_pmf, se_mse_pmf) = pmf.finish(config.replications);
            let (mse_cdf, bias_cdf, mean_cdf, se_mse_cdf) = cdf.finish(config.replications);
            cells.push(CellStats {
                method,
                n,
                replications: config.replications,
                mse_pmf,
                mse_cdf,
                bias_pmf,
                bias_cdf,
                mean_pmf,
                mean_cdf,
                se_mse_pmf,
                se_mse_cdf,
                failure_count: failures,
            });
        }
    }
    Ok(SimulationResult {
        true_pmf,
        true_cdf,
        cells,
    })
}

/// Exact UMVUE mean squared errors (its variances) at one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrueMse {
    pub n: usize,
    pub pmf: f64,
    pub cdf: f64,
}

pub fn true_mse_umvue(config: &StudyConfig, table: &LogStirlingTable) -> Result<Vec<TrueMse>> {
    config
        .sample_sizes
        .iter()
        .map(|&n| {
            let pmf = umvue_pmf_variance(n, config.p_true, config.x_eval, table, config.eps)?;
            let cdf = umvue_cdf_variance(n, config.p_true, config.x_eval, table, config.eps)?;
            Ok(TrueMse {
                n,
                pmf: pmf.value,
                cdf: cdf.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> StudyConfig {
        StudyConfig {
            p_true: LogSeries::new(0.6).unwrap(),
            x_eval: 3,
            sample_sizes: vec![5, 10],
            replications: 40,
            seed: 11,
            ..StudyConfig::default()
        }
    }

    #[test]
    fn validation() {
        assert!(StudyConfig::default().validate().is_ok());
        let mut c = small_config();
        c.replications = 0;
        assert!(c.validate().is_err());
        let mut c = small_config();
        c.sample_sizes = vec![1];
        assert!(c.validate().is_err());
        c.methods = vec![Estimator::Umvue, Estimator::Fit(FitMethod::Mle)];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn single_replication_by_hand() {
        let table = LogStirlingTable::new();
        let mut c = small_config();
        c.replications = 1;
        c.sample_sizes = vec![6];
        let res = run_study(&c, &table).unwrap();
        let sample = draw_replication(&c, 6, 0);
        let true_pmf = c.p_true.pmf(3);
        let true_cdf = c.p_true.cdf(3);
        for &m in &c.methods {
            let e = estimate(m, &sample, 3, &table).unwrap();
            let cell = res.cell(m, 6).unwrap();
            assert_eq!(cell.mse_pmf, (e.pmf - true_pmf).powi(2));
            assert_eq!(cell.mse_cdf, (e.cdf - true_cdf).powi(2));
            assert_eq!(cell.bias_pmf, e.pmf - true_pmf);
            assert_eq!(cell.mean_cdf, e.cdf);
            assert_eq!(cell.failure_count, usize::from(e.failed));
        }
    }

    #[test]
    fn mse_dominates_squared_bias() {
        let table = LogStirlingTable::new();
        let res = run_study(&small_config(), &table).unwrap();
        assert_eq!(res.cells.len(), 10);
        for c in &res.cells {
            assert!(c.mse_pmf + 1e-12 >= c.bias_pmf * c.bias_pmf);
            assert!(c.mse_cdf + 1e-12 >= c.bias_cdf * c.bias_cdf);
        }
    }

    #[test]
    fn estimator_names() {
        for m in Estimator::ALL {
            assert_eq!(m.name().parse::<Estimator>().unwrap(), m);
        }
        assert!("umvue".parse::<Estimator>().is_ok());
        assert!("bayes".parse::<Estimator>().is_err());
    }
}
