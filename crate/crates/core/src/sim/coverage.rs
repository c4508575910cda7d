//! Repeated train/estimate trials for marginal and training-conditional
//! coverage.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bounds::{cv_plus_bound, full_conformal_bound, jackknife_plus_bound, BoundInputs, BoundReport};
use crate::error::{check_alpha, invalid, Result};
use crate::ridge::{stability_constants, Parameterization, RidgeConfig};
use crate::stability::StabilityProfile;
use crate::stats::{binomial_se, mean, std_dev};

use super::generator::GeneratorSpec;
use super::method::{estimate_pe, FittedRegion, Method, PeEstimate};
use super::rng::{stream, StreamRole};

#[cfg(feature = "serde")]
fn default_n_test() -> usize {
    10_000
}

/// Failure-probability split used to compute bound thresholds for a trial
/// run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BoundRequest {
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CoverageConfig {
    pub method: Method,
    pub generator: GeneratorSpec,
    pub n: usize,
    pub alpha: f64,
    pub trials: usize,
    #[cfg_attr(feature = "serde", serde(default = "default_n_test"))]
    pub n_test: usize,
    pub ridge: RidgeConfig,
    /// Extra thresholds at which to report exceedance frequencies.
    #[cfg_attr(feature = "serde", serde(default))]
    pub thresholds: Vec<f64>,
    /// When set, the matching coverage bound is evaluated and its threshold
    /// is added to the queried thresholds.
    #[cfg_attr(feature = "serde", serde(default))]
    pub bounds: Option<BoundRequest>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub base_seed: u64,
}

impl CoverageConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.generator.validate()?;
        self.method.validate(self.n)?;
        if self.trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        if self.n_test == 0 {
            return Err(invalid("n_test", "must be positive"));
        }
        if self.ridge.lambda <= 0.0 {
            return Err(invalid("ridge.lambda", "must be positive"));
        }
        Ok(())
    }

    /// Ridge constants on the generator's domain with its density bound.
    pub fn profile(&self) -> Result<StabilityProfile> {
        if self.ridge.parameterization != Parameterization::PerSample {
            return Err(invalid(
                "ridge.parameterization",
                "bounds need per-sample regularization",
            ));
        }
        Ok(stability_constants(
            self.generator.p,
            self.generator.feature_radius,
            self.generator.response_bound,
            self.ridge.lambda,
            Parameterization::PerSample,
        )?
        .with_density_bound(self.generator.density_bound()))
    }

    /// The training-conditional bound matching the method, if one exists.
    pub fn bound_report(&self) -> Result<Option<BoundReport>> {
        let Some(req) = self.bounds else {
            return Ok(None);
        };
        let inputs = BoundInputs::new(self.alpha, req.eps, req.delta, self.n, self.profile()?);
        Ok(match self.method {
            Method::JackknifePlus => Some(jackknife_plus_bound(&inputs)?),
            Method::Full { .. } => Some(full_conformal_bound(&inputs)?),
            Method::CvPlus { folds } => Some(cv_plus_bound(&inputs.with_folds(folds))?),
            _ => None,
        })
    }

    /// One trial: fresh training set, fitted region, miscoverage estimate.
    pub fn run_trial(&self, trial: usize) -> Result<PeEstimate> {
        let data = self
            .generator
            .sample(self.n, &mut stream(self.base_seed, trial as u64, StreamRole::Train))?;
        let fitted = FittedRegion::fit(&self.method, &data, self.alpha, &self.ridge)?;
        let mut test_rng = stream(self.base_seed, trial as u64, StreamRole::Test);
        estimate_pe(|x, y| fitted.covers(x, y), &self.generator, self.n_test, &mut test_rng)
    }
}

/// Fraction of trials whose estimated miscoverage exceeds `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Exceedance {
    pub threshold: f64,
    pub fraction: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialReport {
    pub method: String,
    pub n: usize,
    pub alpha: f64,
    pub trials: usize,
    pub n_test: usize,
    /// Indexed by trial.
    pub pe_values: Vec<f64>,
    pub mean_pe: f64,
    /// Standard error of `mean_pe` across trials.
    pub mean_se: f64,
    pub std_pe: f64,
    pub exceedance: Vec<Exceedance>,
    pub bound: Option<BoundReport>,
    pub base_seed: u64,
}

impl TrialReport {
    pub fn assemble(config: &CoverageConfig, pe_values: Vec<f64>) -> Result<Self> {
        if pe_values.len() != config.trials {
            return Err(invalid("pe_values", "one value per trial is required"));
        }
        let bound = config.bound_report()?;
        let mut thresholds = config.thresholds.clone();
        if let Some(b) = &bound {
            thresholds.push(b.threshold);
        }
        let r = pe_values.len();
        let exceedance = thresholds
            .iter()
            .map(|&t| {
                let fraction = pe_values.iter().filter(|pe| **pe > t).count() as f64 / r as f64;
                Exceedance {
                    threshold: t,
                    fraction,
                    se: binomial_se(fraction, r),
                }
            })
            .collect();
        let std_pe = std_dev(&pe_values);
        Ok(Self {
            method: config.method.label().into(),
            n: config.n,
            alpha: config.alpha,
            trials: r,
            n_test: config.n_test,
            mean_pe: mean(&pe_values),
            mean_se: std_pe / libm::sqrt(r as f64),
            std_pe,
            pe_values,
            exceedance,
            bound,
            base_seed: config.base_seed,
        })
    }
}

/// Runs every trial sequentially. Parallel drivers call
/// [`CoverageConfig::run_trial`] per index and [`TrialReport::assemble`].
pub fn coverage_experiment(config: &CoverageConfig) -> Result<TrialReport> {
    config.validate()?;
    let pe = (0..config.trials)
        .map(|t| config.run_trial(t).map(|e| e.pe))
        .collect::<Result<Vec<_>>>()?;
    TrialReport::assemble(config, pe)
}
