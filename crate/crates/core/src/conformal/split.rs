use alloc::vec::Vec;

use crate::data::Dataset;
use crate::error::{check_alpha, Result};
use crate::quantile::{abs_residual_score, empirical_quantile_threshold, ScoreSet};
use crate::trainer::{Predictor, Trainer};

use super::IntervalRegion;

/// Split conformal predictor: a model fitted on the training part and a
/// residual threshold from the calibration part.
#[derive(Debug, Clone)]
pub struct SplitConformal<M> {
    pub model: M,
    pub threshold: f64,
    pub alpha: f64,
}

impl<M: Predictor> SplitConformal<M> {
    pub fn calibrate<T>(train: &Dataset, cal: &Dataset, alpha: f64, trainer: &T) -> Result<Self>
    where
        T: Trainer<Model = M>,
    {
        check_alpha(alpha)?;
        let model = trainer.train(train.points())?;
        let scores = cal
            .points()
            .iter()
            .map(|pt| abs_residual_score(model.predict(&pt.x), pt.y))
            .collect::<Result<Vec<_>>>()?;
        let threshold = empirical_quantile_threshold(&ScoreSet::new(scores)?, alpha, true)?;
        Ok(Self {
            model,
            threshold,
            alpha,
        })
    }

    pub fn region(&self, x: &[f64]) -> IntervalRegion {
        if self.threshold.is_infinite() {
            return IntervalRegion::everything();
        }
        let center = self.model.predict(x);
        IntervalRegion::from_endpoints(center - self.threshold, center + self.threshold)
    }
}

/// `{y : |y - mu(x)| <= tau}` with `mu` trained on `train` and `tau` the
/// augmented calibration quantile.
pub fn split_conformal<T: Trainer>(
    train: &Dataset,
    cal: &Dataset,
    x: &[f64],
    alpha: f64,
    trainer: &T,
) -> Result<IntervalRegion> {
    Ok(SplitConformal::calibrate(train, cal, alpha, trainer)?.region(x))
}
