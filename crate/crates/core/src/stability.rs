//! Uniform-stability and regularity constants consumed by the coverage
//! bounds.

use crate::error::{invalid, Result};

/// Constants describing a trainer and its data domain:
///
/// * `c(n) = c_scale / n` — removing one of `n` training points moves the
///   fitted predictor by at most `c(n) / 2` in sup-norm;
/// * `kappa1 |b - b'|_inf <= |mu_b - mu_b'|_inf <= kappa2 |b - b'|_inf`;
/// * `density_bound` — an upper bound `L` on the density of the score
///   distribution, used for every sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityProfile {
    pub p: usize,
    pub feature_radius: f64,
    pub response_bound: f64,
    pub lambda: f64,
    pub c_scale: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub density_bound: Option<f64>,
    /// True when the constants are proven for the trainer (ridge); plug-in
    /// trainers get `false` and their bound reports are flagged.
    pub certified: bool,
}

impl StabilityProfile {
    /// Profile for an arbitrary trainer with user-asserted constants.
    pub fn uncertified(p: usize, c_scale: f64, kappa1: f64, kappa2: f64) -> Result<Self> {
        let profile = Self {
            p,
            feature_radius: f64::NAN,
            response_bound: f64::NAN,
            lambda: f64::NAN,
            c_scale,
            kappa1,
            kappa2,
            density_bound: None,
            certified: false,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn with_density_bound(mut self, l: f64) -> Self {
        self.density_bound = Some(l);
        self
    }

    /// Stability constant `c_n`.
    pub fn c(&self, n: usize) -> f64 {
        self.c_scale / n as f64
    }

    pub fn density(&self) -> Result<f64> {
        match self.density_bound {
            Some(l) if l > 0.0 && l.is_finite() => Ok(l),
            Some(_) => Err(invalid("density_bound", "must be positive and finite")),
            None => Err(invalid("density_bound", "L is required for this bound")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(invalid("p", "must be at least 1"));
        }
        if !(self.c_scale > 0.0 && self.c_scale.is_finite()) {
            return Err(invalid("c_scale", "must be positive and finite"));
        }
        if !(self.kappa1 > 0.0 && self.kappa1.is_finite()) {
            return Err(invalid("kappa1", "must be positive and finite"));
        }
        if !(self.kappa2 >= self.kappa1 && self.kappa2.is_finite()) {
            return Err(invalid("kappa2", "must be finite and at least kappa1"));
        }
        Ok(())
    }
}
