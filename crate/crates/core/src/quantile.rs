//! Nonconformity scores and the order-statistic conventions used by every
//! prediction region.
//!
//! For a multiset `A` of size `n` and level `alpha`:
//!
//! * `upper_quantile_plus` is the `ceil((1 - alpha)(n + 1))`-th smallest
//!   element, or `+inf` when that rank exceeds `n`;
//! * `lower_quantile_minus` is the `floor(alpha (n + 1))`-th smallest
//!   element, or `-inf` when that rank is zero.
//!
//! Ranks are computed from `alpha * (n + 1)` with products lying within a
//! relative `1e-12` of an integer snapped to it, so decimal levels such as
//! `0.15` give the rank one would write down by hand.

use alloc::vec::Vec;

use crate::error::{check_alpha, Error, Result};

const RANK_SNAP: f64 = 1e-12;

/// Absolute residual `|y - prediction|`.
pub fn abs_residual_score(prediction: f64, y: f64) -> Result<f64> {
    if !prediction.is_finite() {
        return Err(Error::NonFinite("prediction"));
    }
    if !y.is_finite() {
        return Err(Error::NonFinite("y"));
    }
    Ok((y - prediction).abs())
}

/// Finite multiset of scores kept in ascending order.
///
/// `+inf` is accepted (it can only ever be the largest element); NaN and
/// `-inf` are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    sorted: Vec<f64>,
}

impl ScoreSet {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("score set"));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::NonFinite("score set"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn has_infinite(&self) -> bool {
        self.sorted.last().is_some_and(|v| v.is_infinite())
    }

    /// `k`-th smallest element, 1-based.
    fn order_stat(&self, k: usize) -> f64 {
        self.sorted[k - 1]
    }
}

fn snap(x: f64) -> f64 {
    let r = libm::round(x);
    if (x - r).abs() <= RANK_SNAP * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// `floor(alpha * (n + 1))`, with near-integer products snapped.
pub fn lower_rank(alpha: f64, n: usize) -> usize {
    libm::floor(snap(alpha * (n as f64 + 1.0))) as usize
}

/// `ceil((1 - alpha) * (n + 1))`, computed as `n + 1 - floor(alpha (n + 1))`.
pub fn upper_rank(alpha: f64, n: usize) -> usize {
    n + 1 - lower_rank(alpha, n)
}

/// `ceil((1 - alpha) * n)`, computed as `n - floor(alpha n)`.
fn plain_rank(alpha: f64, n: usize) -> usize {
    n - libm::floor(snap(alpha * n as f64)) as usize
}

pub(crate) fn upper_of_sorted(sorted: &[f64], alpha: f64) -> f64 {
    let k = upper_rank(alpha, sorted.len());
    if k > sorted.len() {
        f64::INFINITY
    } else {
        sorted[k - 1]
    }
}

/// `upper_of_sorted` of the sorted `values`, by selection.
pub(crate) fn select_upper(values: &mut [f64], alpha: f64) -> f64 {
    let k = upper_rank(alpha, values.len());
    if k > values.len() {
        f64::INFINITY
    } else {
        *values.select_nth_unstable_by(k - 1, f64::total_cmp).1
    }
}

/// `lower_of_sorted` of the sorted `values`, by selection.
pub(crate) fn select_lower(values: &mut [f64], alpha: f64) -> f64 {
    let k = lower_rank(alpha, values.len());
    if k == 0 {
        f64::NEG_INFINITY
    } else {
        *values.select_nth_unstable_by(k - 1, f64::total_cmp).1
    }
}

pub(crate) fn lower_of_sorted(sorted: &[f64], alpha: f64) -> f64 {
    let k = lower_rank(alpha, sorted.len());
    if k == 0 {
        f64::NEG_INFINITY
    } else {
        sorted[k - 1]
    }
}

/// `ceil((1 - alpha)(|A| + 1))`-th smallest element of `A`; `+inf` when
/// `alpha < 1 / (|A| + 1)`.
pub fn upper_quantile_plus(values: &ScoreSet, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(upper_of_sorted(&values.sorted, alpha))
}

/// `floor(alpha (|A| + 1))`-th smallest element of `A`; `-inf` when that
/// rank is zero.
pub fn lower_quantile_minus(values: &ScoreSet, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(lower_of_sorted(&values.sorted, alpha))
}

/// Fraction of values `<= t`.
pub fn empirical_cdf(values: &ScoreSet, t: f64) -> Result<f64> {
    if values.has_infinite() {
        return Err(crate::error::invalid(
            "values",
            "empirical CDF is undefined with the +inf sentinel",
        ));
    }
    let count = values.sorted.partition_point(|v| *v <= t);
    Ok(count as f64 / values.len() as f64)
}

/// Conformal calibration threshold.
///
/// With `augment_with_infinity` this is the `(1 - alpha)` empirical quantile
/// of `scores ∪ {+inf}`, i.e. the `ceil((1 - alpha)(n + 1))`-th smallest
/// score (or `+inf`). Without augmentation it is the
/// `ceil((1 - alpha) n)`-th smallest score.
pub fn empirical_quantile_threshold(
    scores: &ScoreSet,
    alpha: f64,
    augment_with_infinity: bool,
) -> Result<f64> {
    check_alpha(alpha)?;
    let n = scores.len();
    let k = if augment_with_infinity {
        upper_rank(alpha, n)
    } else {
        plain_rank(alpha, n)
    };
    if k > n {
        Ok(f64::INFINITY)
    } else {
        Ok(scores.order_stat(k))
    }
}
