//! Estimation of the probability mass and distribution functions of the
//! logarithmic series distribution.
//!
//! * [`dist`]: the distribution itself, with Kemp's chop-down sampler.
//! * [`stirling`]: log-space Stirling numbers of the first kind and the law
//!   of the sufficient statistic `T`.
//! * [`umvue`]: unbiased estimators of `f(x)` and `F(x)` with exact variances.
//! * [`fit`]: MLE, LSE, WLSE and percentile estimates of `p` with plug-in
//!   PMF/CDF estimators.
//! * [`simulation`]: the Monte Carlo MSE comparison.
//! * [`csvio`]: the CSV layouts written by the `logseries` binary.

pub mod csvio;
pub mod dist;
pub mod error;
pub mod fit;
pub mod numeric;
pub mod optimize;
pub mod rng;
pub mod sample;
pub mod simulation;
pub mod stirling;
pub mod umvue;

pub use dist::LogSeries;
pub use error::{Error, Result};
pub use fit::{fit, fit_lse, fit_mle, fit_pce, fit_wlse, FitMethod, FitResult, OrderedSample};
pub use sample::Sample;
pub use simulation::{run_study, true_mse_umvue, Estimator, SimulationResult, StudyConfig};
pub use stirling::{LogStirlingTable, Sdfk};
pub use umvue::{umvue_cdf, umvue_cdf_variance, umvue_pmf, umvue_pmf_variance, Variance};
