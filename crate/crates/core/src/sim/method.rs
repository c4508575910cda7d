//! Region constructions as configured by experiments, fitted with ridge.

use crate::conformal::{CrossConformal, FullConformalRidge, GridSpec, Jackknife, SplitConformal};
use crate::data::Dataset;
use crate::error::{check_alpha, invalid, Result};
use crate::ridge::{RidgeConfig, RidgeModel};

use super::generator::GeneratorSpec;
use super::rng::SimRng;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "name", deny_unknown_fields))]
pub enum Method {
    /// First `n - n_cal` points train, the last `n_cal` calibrate
    /// (default: half).
    #[cfg_attr(feature = "serde", serde(rename = "split"))]
    Split {
        #[cfg_attr(feature = "serde", serde(default))]
        n_cal: Option<usize>,
    },
    /// Full conformal via the closed-form ridge scores. With a grid, test
    /// labels are snapped to the nearest grid point first.
    #[cfg_attr(feature = "serde", serde(rename = "full"))]
    Full {
        #[cfg_attr(feature = "serde", serde(default))]
        grid: Option<GridSpec>,
    },
    #[cfg_attr(feature = "serde", serde(rename = "jackknife"))]
    Jackknife,
    #[cfg_attr(feature = "serde", serde(rename = "jackknife+"))]
    JackknifePlus,
    #[cfg_attr(feature = "serde", serde(rename = "jackknife+eps"))]
    JackknifePlusInflated { epsilon: f64 },
    #[cfg_attr(feature = "serde", serde(rename = "cv+"))]
    CvPlus { folds: usize },
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Split { .. } => "split",
            Method::Full { .. } => "full",
            Method::Jackknife => "jackknife",
            Method::JackknifePlus => "jackknife+",
            Method::JackknifePlusInflated { .. } => "jackknife+eps",
            Method::CvPlus { .. } => "cv+",
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Method::Split { n_cal } => {
                let c = n_cal.unwrap_or(n / 2);
                if c == 0 || c >= n {
                    return Err(invalid("n_cal", "training and calibration parts must be non-empty"));
                }
            }
            Method::JackknifePlusInflated { epsilon } if !(epsilon >= 0.0) => {
                return Err(invalid("epsilon", "inflation must be nonnegative"));
            }
            Method::CvPlus { folds } => {
                crate::conformal::fold_assignment(n, folds)?;
            }
            Method::Full { grid: Some(g) } => {
                GridSpec::new(g.lo, g.hi, g.points)?;
            }
            Method::Jackknife | Method::JackknifePlus if n < 2 => {
                return Err(invalid("n", "leave-one-out needs n >= 2"));
            }
            _ => {}
        }
        Ok(())
    }
}

/// A method fitted to one training set, ready to answer coverage queries.
#[derive(Debug, Clone)]
pub enum FittedRegion {
    Split(SplitConformal<RidgeModel>),
    Jackknife { state: Jackknife<RidgeModel>, alpha: f64 },
    Cross { state: CrossConformal<RidgeModel>, alpha: f64, epsilon: f64 },
    Full { state: FullConformalRidge, alpha: f64, grid: Option<GridSpec> },
}

impl FittedRegion {
    pub fn fit(method: &Method, dataset: &Dataset, alpha: f64, ridge: &RidgeConfig) -> Result<Self> {
        check_alpha(alpha)?;
        method.validate(dataset.len())?;
        Ok(match *method {
            Method::Split { n_cal } => {
                let n_cal = n_cal.unwrap_or(dataset.len() / 2);
                let (train, cal) = dataset.split_at(dataset.len() - n_cal)?;
                FittedRegion::Split(SplitConformal::calibrate(&train, &cal, alpha, ridge)?)
            }
            Method::Full { grid } => FittedRegion::Full {
                state: FullConformalRidge::new(dataset, *ridge)?,
                alpha,
                grid,
            },
            Method::Jackknife => FittedRegion::Jackknife {
                state: Jackknife::fit(dataset, ridge)?,
                alpha,
            },
            Method::JackknifePlus => FittedRegion::Cross {
                state: CrossConformal::fit_loo(dataset, ridge)?,
                alpha,
                epsilon: 0.0,
            },
            Method::JackknifePlusInflated { epsilon } => FittedRegion::Cross {
                state: CrossConformal::fit_loo(dataset, ridge)?,
                alpha,
                epsilon,
            },
            Method::CvPlus { folds } => FittedRegion::Cross {
                state: CrossConformal::fit_cv(dataset, folds, ridge)?,
                alpha,
                epsilon: 0.0,
            },
        })
    }

    pub fn covers(&self, x: &[f64], y: f64) -> Result<bool> {
        match self {
            FittedRegion::Split(s) => Ok(s.region(x).contains(y)),
            FittedRegion::Jackknife { state, alpha } => Ok(state.region(x, *alpha)?.contains(y)),
            FittedRegion::Cross { state, alpha, epsilon } => {
                Ok(state.inflated_region(x, *alpha, *epsilon)?.contains(y))
            }
            FittedRegion::Full { state, alpha, grid } => match grid {
                None => state.contains(x, y, *alpha),
                Some(g) => match nearest_grid_value(g, y) {
                    Some(snapped) => state.contains(x, snapped, *alpha),
                    None => Ok(false),
                },
            },
        }
    }
}

/// Nearest grid label to `y`, or `None` when `y` lies more than half a step
/// outside the grid.
pub fn nearest_grid_value(grid: &GridSpec, y: f64) -> Option<f64> {
    let step = (grid.hi - grid.lo) / (grid.points - 1) as f64;
    let pos = (y - grid.lo) / step;
    if !(pos >= -0.5 && pos <= (grid.points - 1) as f64 + 0.5) {
        return None;
    }
    let idx = (libm::round(pos).max(0.0) as usize).min(grid.points - 1);
    Some(if idx + 1 == grid.points {
        grid.hi
    } else {
        grid.lo + step * idx as f64
    })
}

/// Monte Carlo miscoverage estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeEstimate {
    pub pe: f64,
    pub se: f64,
    pub n_test: usize,
}

/// Fraction of `n_test` fresh points `(x, y)` from `spec` that the region
/// misses.
pub fn estimate_pe<F>(mut covers: F, spec: &GeneratorSpec, n_test: usize, rng: &mut SimRng) -> Result<PeEstimate>
where
    F: FnMut(&[f64], f64) -> Result<bool>,
{
    if n_test == 0 {
        return Err(invalid("n_test", "must be positive"));
    }
    let mut misses = 0usize;
    for _ in 0..n_test {
        let pt = spec.sample_point(rng);
        if !covers(&pt.x, pt.y)? {
            misses += 1;
        }
    }
    let pe = misses as f64 / n_test as f64;
    Ok(PeEstimate {
        pe,
        se: crate::stats::binomial_se(pe, n_test),
        n_test,
    })
}
