//! Conformal prediction regions built on any symmetric [`Trainer`].
//!
//! [`Trainer`]: crate::trainer::Trainer

mod full;
mod jackknife;
mod region;
mod split;

pub use full::{full_conformal, full_conformal_ridge_exact, FullConformalRidge, GridSpec};
pub use jackknife::{
    cv_plus, fold_assignment, jackknife_baseline, jackknife_plus, jackknife_plus_inflated,
    CrossConformal, Jackknife,
};
pub use region::{ExactRegion, GridRegion, IntervalRegion, Segment};
pub use split::{split_conformal, SplitConformal};
