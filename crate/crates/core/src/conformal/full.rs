use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::data::{DataPoint, Dataset};
use crate::error::{check_alpha, invalid, Error, Result};
use crate::linalg::{dot, Cholesky};
use crate::quantile::upper_rank;
use crate::ridge::{check_points, normal_equations, RidgeConfig};
use crate::trainer::{Predictor, Trainer};

use super::{ExactRegion, GridRegion, Segment};

/// Equally spaced candidate labels on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 2001;

    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid("grid", "bounds must be finite with lo < hi"));
        }
        if points < 2 {
            return Err(invalid("grid", "at least two points are required"));
        }
        Ok(Self { lo, hi, points })
    }

    /// `[-B - margin, B + margin]`.
    pub fn covering(response_bound: f64, margin: f64, points: usize) -> Result<Self> {
        Self::new(-response_bound - margin, response_bound + margin, points)
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

/// Full conformal region on a grid: each candidate `y` is accepted iff, after
/// retraining on `D ∪ {(x, y)}`, its own score is at most the
/// `ceil((1 - alpha)(n + 1))`-th smallest of all `n + 1` scores.
pub fn full_conformal<T: Trainer>(
    dataset: &Dataset,
    x: &[f64],
    alpha: f64,
    trainer: &T,
    grid: &GridSpec,
) -> Result<GridRegion> {
    check_alpha(alpha)?;
    if x.len() != dataset.dim() {
        return Err(Error::DimensionMismatch {
            expected: dataset.dim(),
            got: x.len(),
        });
    }
    let n = dataset.len();
    let rank = upper_rank(alpha, n);
    let ys = grid.values();
    let mut augmented: Vec<DataPoint> = dataset.points().to_vec();
    augmented.push(DataPoint::new(x.to_vec(), 0.0)?);
    let mut scores = Vec::with_capacity(n + 1);
    let mut accepted = Vec::with_capacity(ys.len());
    for &y in &ys {
        augmented[n].y = y;
        let model = trainer.train(&augmented).map_err(|e| Error::CandidateFit {
            y,
            source: Box::new(e),
        })?;
        scores.clear();
        scores.extend(augmented.iter().map(|pt| (pt.y - model.predict(&pt.x)).abs()));
        let own = scores[n];
        scores.sort_by(f64::total_cmp);
        accepted.push(own <= scores[rank - 1]);
    }
    Ok(GridRegion { grid: ys, accepted })
}

/// Ridge full conformal solved in closed form.
///
/// Ridge fitted on `D ∪ {(x, y)}` has coefficients `β₀ + y v`, so every
/// residual is affine in the candidate label and the acceptance set is a
/// finite union of intervals whose endpoints are the labels at which some
/// training score equals the candidate's score.
#[derive(Debug, Clone)]
pub struct FullConformalRidge {
    points: Vec<DataPoint>,
    config: RidgeConfig,
    p: usize,
}

/// Residuals `a + b y` for the `n` training points and the candidate.
struct AffineScores {
    train: Vec<(f64, f64)>,
    own: (f64, f64),
}

impl AffineScores {
    fn count_below(&self, y: f64) -> usize {
        let own = (self.own.0 + self.own.1 * y).abs();
        self.train
            .iter()
            .filter(|(a, b)| (a + b * y).abs() < own)
            .count()
    }
}

impl FullConformalRidge {
    pub fn new(dataset: &Dataset, config: RidgeConfig) -> Result<Self> {
        let p = check_points(dataset.points())?;
        Ok(Self {
            points: dataset.points().to_vec(),
            config,
            p,
        })
    }

    fn affine_scores(&self, x: &[f64]) -> Result<AffineScores> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.len(),
            });
        }
        let n = self.points.len();
        let (mut gram, xty) = normal_equations(&self.points, self.p, self.config.ridge_shift(n + 1));
        gram.rank_one_update(x, 1.0);
        let chol = Cholesky::factor(&gram)?;
        let beta0 = chol.solve(&xty);
        let v = chol.solve(x);
        let train = self
            .points
            .iter()
            .map(|pt| (pt.y - dot(&pt.x, &beta0), -dot(&pt.x, &v)))
            .collect();
        let own = (-dot(x, &beta0), 1.0 - dot(x, &v));
        Ok(AffineScores { train, own })
    }

    /// Exact membership of `y` in the full conformal region at `x`.
    pub fn contains(&self, x: &[f64], y: f64, alpha: f64) -> Result<bool> {
        check_alpha(alpha)?;
        let rank = upper_rank(alpha, self.points.len());
        Ok(self.affine_scores(x)?.count_below(y) < rank)
    }

    pub fn region(&self, x: &[f64], alpha: f64) -> Result<ExactRegion> {
        check_alpha(alpha)?;
        let rank = upper_rank(alpha, self.points.len());
        let scores = self.affine_scores(x)?;
        let (a0, b0) = scores.own;
        let mut breaks: Vec<f64> = Vec::with_capacity(2 * scores.train.len());
        for &(a, b) in &scores.train {
            // a + b y = a0 + b0 y  and  a + b y = -(a0 + b0 y)
            if b != b0 {
                breaks.push((a0 - a) / (b - b0));
            }
            if b != -b0 {
                breaks.push((-a0 - a) / (b + b0));
            }
        }
        breaks.retain(|z| z.is_finite());
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let accept = |y: f64| scores.count_below(y) < rank;
        // Pieces alternate: open gap, breakpoint, open gap, ..., open gap.
        let mut pieces: Vec<(f64, f64, bool)> = Vec::with_capacity(2 * breaks.len() + 1);
        let gap_probe = |lo: f64, hi: f64| -> f64 {
            match (lo.is_finite(), hi.is_finite()) {
                (false, false) => 0.0,
                (false, true) => hi - 1.0,
                (true, false) => lo + 1.0,
                (true, true) => lo + (hi - lo) / 2.0,
            }
        };
        let mut prev = f64::NEG_INFINITY;
        for &z in &breaks {
            pieces.push((prev, z, accept(gap_probe(prev, z))));
            pieces.push((z, z, accept(z)));
            prev = z;
        }
        pieces.push((prev, f64::INFINITY, accept(gap_probe(prev, f64::INFINITY))));

        let mut segments: Vec<Segment> = Vec::new();
        let mut open: Option<Segment> = None;
        for (i, &(lo, hi, ok)) in pieces.iter().enumerate() {
            let is_point = i % 2 == 1;
            if ok {
                match open.as_mut() {
                    Some(seg) => {
                        seg.hi = hi;
                        seg.hi_closed = is_point;
                    }
                    None => {
                        open = Some(Segment {
                            lo,
                            hi,
                            lo_closed: is_point,
                            hi_closed: is_point,
                        })
                    }
                }
            } else if let Some(seg) = open.take() {
                segments.push(seg);
            }
        }
        segments.extend(open);
        for seg in &mut segments {
            if seg.lo.is_infinite() {
                seg.lo_closed = false;
            }
            if seg.hi.is_infinite() {
                seg.hi_closed = false;
            }
        }
        Ok(ExactRegion { segments })
    }
}

/// Exact ridge full conformal region as a union of intervals.
pub fn full_conformal_ridge_exact(
    dataset: &Dataset,
    x: &[f64],
    alpha: f64,
    config: &RidgeConfig,
) -> Result<ExactRegion> {
    FullConformalRidge::new(dataset, *config)?.region(x, alpha)
}
