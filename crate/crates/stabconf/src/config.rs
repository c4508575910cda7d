//! Experiment configuration files.
//!
//! A config is one JSON object whose `kind` selects the experiment; the
//! remaining keys are the fields of the matching core config. Unknown keys
//! are rejected.
//!
//! ```json
//! {
//!   "kind": "coverage",
//!   "method": { "name": "jackknife+" },
//!   "generator": {
//!     "p": 2, "feature_radius": 1.0, "response_bound": 1.0,
//!     "theta_star": [0.5, 0.0],
//!     "noise": { "family": "uniform", "half_width": 0.4 }
//!   },
//!   "n": 40, "alpha": 0.1, "trials": 1000, "n_test": 1000,
//!   "ridge": { "lambda": 1.0, "parameterization": "per-sample" },
//!   "bounds": { "eps": 0.05, "delta": 0.05 },
//!   "base_seed": 7
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stabconf_core::sim::{ConcentrationConfig, CoverageConfig, RateConfig};

use crate::error::{CliError, CliResult};

/// Environment variable that replaces the configured base seed.
pub const SEED_ENV: &str = "STABCONF_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentConfig {
    Coverage(CoverageConfig),
    Concentration(ConcentrationConfig),
    Rate(RateConfig),
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        match self {
            ExperimentConfig::Coverage(c) => c.validate()?,
            ExperimentConfig::Concentration(c) => c.validate()?,
            ExperimentConfig::Rate(c) => c.validate()?,
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::Coverage(_) => "coverage",
            ExperimentConfig::Concentration(_) => "concentration",
            ExperimentConfig::Rate(_) => "rate",
        }
    }

    pub fn base_seed(&self) -> u64 {
        match self {
            ExperimentConfig::Coverage(c) => c.base_seed,
            ExperimentConfig::Concentration(c) => c.base_seed,
            ExperimentConfig::Rate(c) => c.base_seed,
        }
    }

    pub fn set_base_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Coverage(c) => c.base_seed = seed,
            ExperimentConfig::Concentration(c) => c.base_seed = seed,
            ExperimentConfig::Rate(c) => c.base_seed = seed,
        }
    }

    /// SHA-256 of the canonical JSON form, as lowercase hex.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Where the base seed of a run came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Config,
    Env,
}

/// Parses the value of [`SEED_ENV`], if set.
pub fn seed_override(value: Option<&str>) -> CliResult<Option<u64>> {
    match value {
        None => Ok(None),
        Some(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|e| CliError::config(SEED_ENV, format!("`{s}` is not an unsigned integer: {e}"))),
    }
}
