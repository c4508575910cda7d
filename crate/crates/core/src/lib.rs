//! Conformal prediction regions with training-conditional coverage bounds
//! for uniformly stable trainers.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration files and the
//! command line live in the `stabconf` crate.
//!
//! * [`quantile`]: scores and order-statistic conventions
//! * [`ridge`]: closed-form ridge, leave-one-out refits, stability constants
//! * [`conformal`]: split, full, jackknife, jackknife+, CV+ regions
//! * [`bounds`]: coverage bounds, concentration tails, rate comparison
//! * [`sim`]: synthetic data, miscoverage estimation, Monte Carlo trials

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod conformal;
pub mod data;
pub mod error;
pub mod linalg;
pub mod quantile;
pub mod ridge;
pub mod sim;
pub mod stability;
pub mod stats;
pub mod trainer;

pub use data::{DataPoint, Dataset, Domain};
pub use error::{Error, Result};
pub use ridge::{LooMethod, Parameterization, RidgeConfig, RidgeModel};
pub use stability::StabilityProfile;
pub use trainer::{MeanTrainer, Predictor, Trainer};
