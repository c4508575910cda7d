//! Empirical counterparts of the concentration tails in [`crate::bounds`].

use alloc::vec::Vec;

use crate::bounds::{
    dkw_tail, full_model_concentration_tail, loo_concentration_tail, mcdiarmid_tail, Tail,
};
use crate::data::DataPoint;
use crate::error::{invalid, Result};
use crate::linalg::norm2;
use crate::ridge::{fit_points, loo_models, stability_constants, LooMethod, Parameterization, RidgeConfig};
use crate::stability::StabilityProfile;
use crate::stats::binomial_se;

use super::generator::GeneratorSpec;
use super::rng::{stream, SimRng, StreamRole};

/// Number of draws behind the reference CDF of the DKW target.
pub const REFERENCE_SAMPLES: usize = 1_000_000;

/// Auxiliary replicates per trial used to estimate expected coefficients.
pub const AUX_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Target {
    /// `|β̂_n - β̄_n|_inf`.
    Lemma1,
    /// `max_i sup_x |x·(β̂₋ᵢ - β̄_{n-1})|`.
    Lemma2,
    /// `sup_x |x·(β̂_n - β̄_n)|`.
    Lemma3,
    /// `sup_t |F̂_n(t) - F(t)|` for the score `|Y - θ*ᵀX|`.
    Dkw,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ConcentrationConfig {
    pub target: Target,
    pub generator: GeneratorSpec,
    pub n: usize,
    pub trials: usize,
    /// Deviation levels; for `dkw` these are CDF deviations.
    pub eps_list: Vec<f64>,
    /// Ridge strength (per-sample parameterization).
    #[cfg_attr(feature = "serde", serde(default = "default_lambda"))]
    pub lambda: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub base_seed: u64,
}

#[cfg(feature = "serde")]
fn default_lambda() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConcentrationRow {
    pub eps: f64,
    /// Fraction of trials with deviation `>= eps`.
    pub empirical: f64,
    pub se: f64,
    pub theoretical: Tail,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConcentrationTable {
    pub target: Target,
    pub n: usize,
    pub trials: usize,
    pub aux_trials: usize,
    /// Deviation per trial, indexed by trial.
    pub deviations: Vec<f64>,
    /// Largest deviation the ridge algebra allows (`inf` for `dkw`: 1).
    pub a_priori_bound: f64,
    /// Standard error of the estimated expectation, in the units of the
    /// deviation; zero for `dkw`.
    pub estimation_se: f64,
    pub rows: Vec<ConcentrationRow>,
    pub base_seed: u64,
}

impl ConcentrationConfig {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.trials < 100 {
            return Err(invalid("trials", "at least 100 trials are required"));
        }
        if self.n < 2 {
            return Err(invalid("n", "must be at least 2"));
        }
        if self.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(invalid("eps_list", "deviation levels must be positive"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", "must be positive"));
        }
        Ok(())
    }

    pub fn ridge(&self) -> RidgeConfig {
        RidgeConfig {
            lambda: self.lambda,
            parameterization: Parameterization::PerSample,
        }
    }

    pub fn profile(&self) -> Result<StabilityProfile> {
        let g = &self.generator;
        stability_constants(g.p, g.feature_radius, g.response_bound, self.lambda, Parameterization::PerSample)
    }

    pub fn aux_trials(&self) -> usize {
        match self.target {
            Target::Dkw => 0,
            _ => AUX_FACTOR * self.trials,
        }
    }

    /// `sup` of the deviation over all datasets: `|β̂| <= bB/λ` for
    /// per-sample ridge, so coefficient gaps are at most `2bB/λ` and
    /// prediction gaps at most `2b²B/λ`.
    pub fn a_priori_bound(&self) -> f64 {
        let g = &self.generator;
        let coef = 2.0 * g.feature_radius * g.response_bound / self.lambda;
        match self.target {
            Target::Lemma1 => coef,
            Target::Lemma2 | Target::Lemma3 => g.feature_radius * coef,
            Target::Dkw => 1.0,
        }
    }

    fn theoretical(&self, eps: f64, profile: &StabilityProfile) -> Tail {
        match self.target {
            Target::Lemma1 => mcdiarmid_tail(eps, self.n, profile),
            Target::Lemma2 => loo_concentration_tail(eps, self.n, profile),
            Target::Lemma3 => full_model_concentration_tail(eps, self.n, profile),
            Target::Dkw => dkw_tail(self.n, eps),
        }
    }

    /// Size of the datasets behind the expectation being estimated.
    fn aux_size(&self) -> usize {
        match self.target {
            Target::Lemma2 => self.n - 1,
            _ => self.n,
        }
    }

    /// Coefficients fitted on auxiliary replicate `index`.
    pub fn aux_coefficients(&self, index: usize) -> Result<Vec<f64>> {
        let mut rng = stream(self.base_seed, index as u64, StreamRole::Auxiliary);
        let pts = sample_points(&self.generator, self.aux_size(), &mut rng);
        Ok(fit_points(&pts, &self.ridge())?.beta)
    }

    /// Reference sample for `dkw`, sorted.
    pub fn reference_scores(&self) -> Vec<f64> {
        let mut rng = stream(self.base_seed, 0, StreamRole::Reference);
        let mut scores: Vec<f64> = (0..REFERENCE_SAMPLES)
            .map(|_| score(&self.generator, &mut rng))
            .collect();
        scores.sort_by(f64::total_cmp);
        scores
    }

    /// Deviation of trial `index` from `expected` (mean coefficients, or
    /// the sorted reference sample for `dkw`).
    pub fn trial_deviation(&self, index: usize, expected: &[f64]) -> Result<f64> {
        let mut rng = stream(self.base_seed, index as u64, StreamRole::Train);
        let b = self.generator.feature_radius;
        if self.target == Target::Dkw {
            let mut s: Vec<f64> = (0..self.n).map(|_| score(&self.generator, &mut rng)).collect();
            s.sort_by(f64::total_cmp);
            return Ok(ks_distance(&s, expected));
        }
        let pts = sample_points(&self.generator, self.n, &mut rng);
        let ridge = self.ridge();
        Ok(match self.target {
            Target::Lemma1 => {
                let beta = fit_points(&pts, &ridge)?.beta;
                beta.iter().zip(expected).fold(0.0, |m, (a, e)| m.max((a - e).abs()))
            }
            Target::Lemma3 => b * gap2(&fit_points(&pts, &ridge)?.beta, expected),
            Target::Lemma2 => {
                let data = crate::data::Dataset::new(pts, self.generator.domain())?;
                loo_models(&data, &ridge, LooMethod::Naive)?
                    .iter()
                    .fold(0.0, |m, model| m.max(b * gap2(&model.beta, expected)))
            }
            Target::Dkw => unreachable!(),
        })
    }

    /// Mean of the auxiliary coefficients and the standard error of that
    /// mean in deviation units.
    pub fn expected_coefficients(&self, aux: &[Vec<f64>]) -> (Vec<f64>, f64) {
        let p = self.generator.p;
        let r = aux.len() as f64;
        let mut mean = alloc::vec![0.0; p];
        for beta in aux {
            for (m, v) in mean.iter_mut().zip(beta) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= r);
        let se: Vec<f64> = (0..p)
            .map(|j| {
                let ss: f64 = aux.iter().map(|b| (b[j] - mean[j]) * (b[j] - mean[j])).sum();
                libm::sqrt(ss / (r - 1.0) / r)
            })
            .collect();
        let se = match self.target {
            Target::Lemma1 => se.iter().fold(0.0f64, |m, v| m.max(*v)),
            _ => self.generator.feature_radius * norm2(&se),
        };
        (mean, se)
    }

    pub fn assemble(&self, deviations: Vec<f64>, estimation_se: f64) -> Result<ConcentrationTable> {
        let profile = self.profile()?;
        let r = deviations.len();
        let rows = self
            .eps_list
            .iter()
            .map(|&eps| {
                let empirical = deviations.iter().filter(|d| **d >= eps).count() as f64 / r as f64;
                ConcentrationRow {
                    eps,
                    empirical,
                    se: binomial_se(empirical, r),
                    theoretical: self.theoretical(eps, &profile),
                }
            })
            .collect();
        Ok(ConcentrationTable {
            target: self.target,
            n: self.n,
            trials: self.trials,
            aux_trials: self.aux_trials(),
            deviations,
            a_priori_bound: self.a_priori_bound(),
            estimation_se,
            rows,
            base_seed: self.base_seed,
        })
    }
}

fn sample_points(spec: &GeneratorSpec, n: usize, rng: &mut SimRng) -> Vec<DataPoint> {
    (0..n).map(|_| spec.sample_point(rng)).collect()
}

fn score(spec: &GeneratorSpec, rng: &mut SimRng) -> f64 {
    let pt = spec.sample_point(rng);
    (pt.y - crate::linalg::dot(&spec.theta_star, &pt.x)).abs()
}

fn gap2(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Exact `sup_t |F_a(t) - F_b(t)|` between the empirical CDFs of two sorted
/// samples, checking both sides of every jump of `a`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let m = b.len() as f64;
    let mut sup = 0.0f64;
    let mut k = 0;
    while k < a.len() {
        let t = a[k];
        let next = k + a[k..].partition_point(|v| *v <= t);
        // F_a is k/n just below t and next/n at t.
        let below = b.partition_point(|v| *v < t) as f64 / m;
        let at = b.partition_point(|v| *v <= t) as f64 / m;
        sup = sup.max((k as f64 / n - below).abs());
        sup = sup.max((next as f64 / n - at).abs());
        k = next;
    }
    sup
}

/// Runs a concentration experiment sequentially.
pub fn concentration_experiment(config: &ConcentrationConfig) -> Result<ConcentrationTable> {
    config.validate()?;
    let (expected, se) = if config.target == Target::Dkw {
        (config.reference_scores(), 0.0)
    } else {
        let aux = (0..config.aux_trials())
            .map(|i| config.aux_coefficients(i))
            .collect::<Result<Vec<_>>>()?;
        config.expected_coefficients(&aux)
    };
    let dev = (0..config.trials)
        .map(|t| config.trial_deviation(t, &expected))
        .collect::<Result<Vec<_>>>()?;
    config.assemble(dev, se)
}
