//! Closed-form training-conditional coverage bounds and the concentration
//! tails behind them.
//!
//! Every bound is reported as `P(P_e(D_n) > t) <= q` with the threshold
//! split into named additive slack terms, `t = alpha + Σ terms`. Vacuous
//! values (`t >= 1` or `q >= 1`) are kept raw and flagged. Logarithms are
//! natural.

mod coverage;
mod rates;
mod tails;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_alpha, invalid, Result};
use crate::stability::StabilityProfile;

pub use coverage::{
    bian_barber_cv_bound, cv_plus_bound, full_conformal_bound, jackknife_plus_bound,
    liang_barber_bound, psi_out_upper, LiangBarberVariant,
};
pub use rates::{balanced_m, locate_crossover, rate_comparison_table, RateRow, RateTable};
pub use tails::{
    dkw_tail, full_model_concentration_tail, loo_concentration_tail, mcdiarmid_tail, Tail,
};

/// Parameters shared by the coverage bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundInputs {
    pub alpha: f64,
    /// Failure probability charged to the model concentration step.
    pub eps: f64,
    /// Failure probability charged to the empirical-CDF step.
    pub delta: f64,
    pub n: usize,
    pub profile: StabilityProfile,
    /// CV+ fold size, or the augmentation size of the (m, n)-stability bound.
    pub m: Option<usize>,
    /// Interval inflation for the (m, n)-stability bound.
    pub gamma: Option<f64>,
    /// Number of CV+ folds; gives `m = n / K` when `m` is unset.
    pub k: Option<usize>,
}

impl BoundInputs {
    pub fn new(alpha: f64, eps: f64, delta: f64, n: usize, profile: StabilityProfile) -> Self {
        Self {
            alpha,
            eps,
            delta,
            n,
            profile,
            m: None,
            gamma: None,
            k: None,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_folds(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    /// Fold size: `m` if given, otherwise `n / K`.
    pub fn fold_size(&self) -> Result<usize> {
        match (self.m, self.k) {
            (Some(m), _) => Ok(m),
            (None, Some(k)) if k >= 1 && self.n % k == 0 => Ok(self.n / k),
            (None, Some(k)) => Err(invalid(
                "K",
                alloc::format!("{k} folds do not divide n = {}", self.n),
            )),
            (None, None) => Err(invalid("m", "fold size or fold count is required")),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        for (name, v) in [("eps", self.eps), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(name, "must lie in (0, 1)"));
            }
        }
        self.profile.validate()
    }
}

/// One named additive component of a threshold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Term {
    pub name: String,
    pub value: f64,
}

/// `P(P_e > threshold) <= failure_prob`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub name: String,
    pub inputs: BoundInputs,
    pub threshold: f64,
    pub failure_prob: f64,
    pub terms: Vec<Term>,
    pub vacuous: bool,
    /// False when the stability constants come from an uncertified trainer.
    pub certified: bool,
}

impl BoundReport {
    pub(crate) fn assemble(
        name: &str,
        inputs: &BoundInputs,
        terms: Vec<(&str, f64)>,
        failure_prob: f64,
    ) -> Self {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(|(name, value)| Term {
                name: name.into(),
                value,
            })
            .collect();
        let threshold = terms.iter().fold(inputs.alpha, |acc, t| acc + t.value);
        Self {
            name: name.into(),
            inputs: *inputs,
            threshold,
            failure_prob,
            vacuous: !(threshold < 1.0 && failure_prob < 1.0),
            terms,
            certified: inputs.profile.certified,
        }
    }

    /// `threshold - alpha`.
    pub fn slack(&self) -> f64 {
        self.terms.iter().map(|t| t.value).sum()
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}
