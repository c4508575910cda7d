//! Synthetic data with certified constants and Monte Carlo harnesses for
//! coverage, concentration and rates.
//!
//! Drivers that parallelize trials call the per-trial methods
//! (`run_trial`, `trial_deviation`, ...) and the `assemble` functions; the
//! sequential `*_experiment` functions give the same results.

pub mod concentration;
pub mod coverage;
pub mod generator;
pub mod method;
pub mod rate;
pub mod rng;

pub use concentration::{concentration_experiment, ConcentrationConfig, ConcentrationRow, ConcentrationTable, Target};
pub use coverage::{coverage_experiment, BoundRequest, CoverageConfig, Exceedance, TrialReport};
pub use generator::{generate, GeneratorSpec, Noise};
pub use method::{estimate_pe, nearest_grid_value, FittedRegion, Method, PeEstimate};
pub use rate::{rate_experiment, RateConfig, RateExperiment, RateExperimentRow};
pub use rng::{derive_seed, stream, SimRng, StreamRole};
