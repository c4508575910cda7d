//! Small descriptive statistics used by the Monte Carlo harness and the rate
//! fits.

use alloc::vec::Vec;

use crate::error::{invalid, Result};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (denominator `n - 1`).
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (values.len() - 1) as f64)
}

/// Standard error of a proportion estimated from `trials` Bernoulli draws.
pub fn binomial_se(p: f64, trials: usize) -> f64 {
    libm::sqrt((p * (1.0 - p)).max(0.0) / trials as f64)
}

/// `ceil(q n)`-th smallest value (lower empirical quantile).
pub fn empirical_quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = libm::ceil(q * sorted.len() as f64).clamp(1.0, sorted.len() as f64) as usize;
    sorted[k - 1]
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("fit", "need at least two (x, y) pairs of equal length"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(invalid("fit", "log-log fit needs positive finite values"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = ys.iter().map(|v| libm::log(*v)).collect();
    let mx = mean(&lx);
    let my = mean(&ly);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}
