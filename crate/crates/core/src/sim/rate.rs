//! Theory rate table joined with Monte Carlo miscoverage at each `n`.

use alloc::vec::Vec;

use crate::bounds::{rate_comparison_table, RateRow, RateTable};
use crate::error::{invalid, Result};
use crate::ridge::{stability_constants, Parameterization, RidgeConfig};
use crate::stats::{empirical_quantile, loglog_slope, mean, std_dev};

use super::coverage::{CoverageConfig, TrialReport};
use super::generator::GeneratorSpec;
use super::method::Method;
use super::rng::derive_seed;

#[cfg(feature = "serde")]
fn default_n_test() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct RateConfig {
    pub method: Method,
    pub generator: GeneratorSpec,
    pub n_list: Vec<usize>,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
    pub trials: usize,
    #[cfg_attr(feature = "serde", serde(default = "default_n_test"))]
    pub n_test: usize,
    pub lambda: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub base_seed: u64,
}

/// One `n` of the joined table. Theory columns are copied from
/// [`RateRow`]; thresholds are `alpha + slack`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateExperimentRow {
    pub theory: RateRow,
    pub mean_pe: f64,
    pub q95_pe: f64,
    pub std_pe: f64,
    /// `std_pe` with the binomial test-sampling variance removed.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateExperiment {
    pub rows: Vec<RateExperimentRow>,
    pub crossover: Option<usize>,
    /// Log-log slope of `spread` against `n`, when every spread is positive.
    pub spread_slope: Option<f64>,
}

impl RateExperiment {
    pub const CSV_HEADER: &'static str =
        "n,ours_jplus,ours_fc,lb_slack,lb_q,mean_pe,q95_pe,std_pe,spread";
}

impl RateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_list", "must be non-empty and strictly increasing"));
        }
        for &n in &self.n_list {
            self.coverage_config(n).validate()?;
        }
        Ok(())
    }

    /// Coverage run for sample size `n`, seeded from `(base_seed, n)`.
    pub fn coverage_config(&self, n: usize) -> CoverageConfig {
        CoverageConfig {
            method: self.method.clone(),
            generator: self.generator.clone(),
            n,
            alpha: self.alpha,
            trials: self.trials,
            n_test: self.n_test,
            ridge: RidgeConfig {
                lambda: self.lambda,
                parameterization: Parameterization::PerSample,
            },
            thresholds: Vec::new(),
            bounds: None,
            base_seed: derive_seed(self.base_seed, n as u64),
        }
    }

    pub fn theory(&self) -> Result<RateTable> {
        let g = &self.generator;
        let profile = stability_constants(
            g.p,
            g.feature_radius,
            g.response_bound,
            self.lambda,
            Parameterization::PerSample,
        )?
        .with_density_bound(g.density_bound());
        rate_comparison_table(&self.n_list, &profile, self.alpha, self.eps, self.delta, self.gamma)
    }

    /// Joins the theory table with one coverage report per entry of
    /// `n_list`, in the same order.
    pub fn assemble(&self, reports: &[TrialReport]) -> Result<RateExperiment> {
        if reports.len() != self.n_list.len() {
            return Err(invalid("reports", "one coverage report per n is required"));
        }
        let table = self.theory()?;
        let rows: Vec<RateExperimentRow> = table
            .rows
            .iter()
            .zip(reports)
            .map(|(theory, rep)| {
                let pe = &rep.pe_values;
                let noise: f64 =
                    mean(&pe.iter().map(|v| v * (1.0 - v)).collect::<Vec<_>>()) / self.n_test as f64;
                let std_pe = std_dev(pe);
                RateExperimentRow {
                    theory: *theory,
                    mean_pe: mean(pe),
                    q95_pe: empirical_quantile(pe, 0.95),
                    std_pe,
                    spread: libm::sqrt((std_pe * std_pe - noise).max(0.0)),
                }
            })
            .collect();
        let ns: Vec<f64> = self.n_list.iter().map(|n| *n as f64).collect();
        let spreads: Vec<f64> = rows.iter().map(|r| r.spread).collect();
        Ok(RateExperiment {
            spread_slope: loglog_slope(&ns, &spreads).ok(),
            crossover: table.crossover,
            rows,
        })
    }
}

pub fn rate_experiment(config: &RateConfig) -> Result<RateExperiment> {
    config.validate()?;
    let reports = config
        .n_list
        .iter()
        .map(|&n| super::coverage::coverage_experiment(&config.coverage_config(n)))
        .collect::<Result<Vec<_>>>()?;
    config.assemble(&reports)
}
