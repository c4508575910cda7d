use alloc::vec::Vec;

use crate::data::Dataset;
use crate::error::{check_alpha, invalid, Error, Result};
use crate::quantile::{
    abs_residual_score, empirical_quantile_threshold, select_lower, select_upper, ScoreSet,
};
use crate::ridge::drop_index;
use crate::trainer::{Predictor, Trainer};

use super::IntervalRegion;

/// Fold index of every point when `n` points are cut into `k` contiguous
/// folds of equal size.
pub fn fold_assignment(n: usize, k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(invalid("K", "at least two folds are required"));
    }
    if n % k != 0 {
        return Err(invalid(
            "K",
            alloc::format!("{k} folds do not divide n = {n} evenly"),
        ));
    }
    let m = n / k;
    Ok((0..n).map(|i| i / m).collect())
}

/// Jackknife+ / CV+ state: hold-out models, the model each point was held
/// out from, and the hold-out residuals.
#[derive(Debug, Clone)]
pub struct CrossConformal<M> {
    models: Vec<M>,
    fold_of: Vec<usize>,
    residuals: Vec<f64>,
}

impl<M: Predictor> CrossConformal<M> {
    /// Leave-one-out fits (jackknife+).
    pub fn fit_loo<T: Trainer<Model = M>>(dataset: &Dataset, trainer: &T) -> Result<Self> {
        let n = dataset.len();
        Self::fit_folds(dataset, (0..n).collect(), n, trainer)
    }

    /// K-fold fits (CV+); `K` must divide `n`.
    pub fn fit_cv<T: Trainer<Model = M>>(dataset: &Dataset, k: usize, trainer: &T) -> Result<Self> {
        let fold_of = fold_assignment(dataset.len(), k)?;
        Self::fit_folds(dataset, fold_of, k, trainer)
    }

    fn fit_folds<T: Trainer<Model = M>>(
        dataset: &Dataset,
        fold_of: Vec<usize>,
        k: usize,
        trainer: &T,
    ) -> Result<Self> {
        let points = dataset.points();
        let models = (0..k)
            .map(|fold| {
                if k == points.len() {
                    trainer.train(&drop_index(points, fold))
                } else {
                    let kept: Vec<_> = points
                        .iter()
                        .zip(&fold_of)
                        .filter(|(_, f)| **f != fold)
                        .map(|(p, _)| p.clone())
                        .collect();
                    trainer.train(&kept)
                }
            })
            .collect::<Result<Vec<M>>>()?;
        let residuals = points
            .iter()
            .zip(&fold_of)
            .map(|(pt, &f)| abs_residual_score(models[f].predict(&pt.x), pt.y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            models,
            fold_of,
            residuals,
        })
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn models(&self) -> &[M] {
        &self.models
    }

    /// Raw `(q-(S-(x)), q+(S+(x)))`; the lower end may exceed the upper one.
    pub fn endpoints(&self, x: &[f64], alpha: f64) -> Result<(f64, f64)> {
        check_alpha(alpha)?;
        let preds: Vec<f64> = self.models.iter().map(|m| m.predict(x)).collect();
        let (mut lower, mut upper): (Vec<f64>, Vec<f64>) = self
            .fold_of
            .iter()
            .zip(&self.residuals)
            .map(|(&f, &r)| (preds[f] - r, preds[f] + r))
            .unzip();
        if lower.iter().chain(&upper).any(|v| v.is_nan()) {
            return Err(Error::NonFinite("hold-out predictions"));
        }
        Ok((select_lower(&mut lower, alpha), select_upper(&mut upper, alpha)))
    }

    pub fn region(&self, x: &[f64], alpha: f64) -> Result<IntervalRegion> {
        let (lo, hi) = self.endpoints(x, alpha)?;
        Ok(IntervalRegion::from_endpoints(lo, hi))
    }

    /// `[q- - eps, q+ + eps]`.
    pub fn inflated_region(&self, x: &[f64], alpha: f64, epsilon: f64) -> Result<IntervalRegion> {
        if !(epsilon >= 0.0) {
            return Err(invalid("epsilon", "inflation must be nonnegative"));
        }
        let (lo, hi) = self.endpoints(x, alpha)?;
        Ok(IntervalRegion::from_endpoints(lo - epsilon, hi + epsilon))
    }
}

/// Classic jackknife: full-data model plus/minus the augmented quantile of
/// leave-one-out residuals.
#[derive(Debug, Clone)]
pub struct Jackknife<M> {
    center: M,
    scores: ScoreSet,
}

impl<M: Predictor> Jackknife<M> {
    pub fn fit<T: Trainer<Model = M>>(dataset: &Dataset, trainer: &T) -> Result<Self> {
        let loo = CrossConformal::fit_loo(dataset, trainer)?;
        let center = trainer.train(dataset.points())?;
        Ok(Self {
            center,
            scores: ScoreSet::new(loo.residuals)?,
        })
    }

    pub fn region(&self, x: &[f64], alpha: f64) -> Result<IntervalRegion> {
        let radius = empirical_quantile_threshold(&self.scores, alpha, true)?;
        if radius.is_infinite() {
            return Ok(IntervalRegion::everything());
        }
        let c = self.center.predict(x);
        Ok(IntervalRegion::from_endpoints(c - radius, c + radius))
    }
}

pub fn jackknife_plus<T: Trainer>(
    dataset: &Dataset,
    x: &[f64],
    alpha: f64,
    trainer: &T,
) -> Result<IntervalRegion> {
    check_alpha(alpha)?;
    CrossConformal::fit_loo(dataset, trainer)?.region(x, alpha)
}

pub fn jackknife_plus_inflated<T: Trainer>(
    dataset: &Dataset,
    x: &[f64],
    alpha: f64,
    epsilon: f64,
    trainer: &T,
) -> Result<IntervalRegion> {
    check_alpha(alpha)?;
    if !(epsilon >= 0.0) {
        return Err(invalid("epsilon", "inflation must be nonnegative"));
    }
    CrossConformal::fit_loo(dataset, trainer)?.inflated_region(x, alpha, epsilon)
}

pub fn jackknife_baseline<T: Trainer>(
    dataset: &Dataset,
    x: &[f64],
    alpha: f64,
    trainer: &T,
) -> Result<IntervalRegion> {
    check_alpha(alpha)?;
    Jackknife::fit(dataset, trainer)?.region(x, alpha)
}

pub fn cv_plus<T: Trainer>(
    dataset: &Dataset,
    x: &[f64],
    alpha: f64,
    k: usize,
    trainer: &T,
) -> Result<IntervalRegion> {
    check_alpha(alpha)?;
    CrossConformal::fit_cv(dataset, k, trainer)?.region(x, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::{ConstantModel, MeanTrainer};
    use crate::DataPoint;
    use alloc::vec;

    fn hand3() -> Dataset {
        Dataset::from_pairs(&[(0.0, 0.0), (1.0, 1.0), (-1.0, -1.0)]).unwrap()
    }

    struct Zero;
    impl Trainer for Zero {
        type Model = ConstantModel;
        fn train(&self, _: &[DataPoint]) -> Result<ConstantModel> {
            Ok(ConstantModel(0.0))
        }
    }

    #[test]
    fn jackknife_plus_hand_example() {
        let r = jackknife_plus(&hand3(), &[0.0], 0.5, &MeanTrainer).unwrap();
        assert_eq!(r, IntervalRegion::Interval { lo: -1.0, hi: 1.0 });
        let cc = CrossConformal::fit_loo(&hand3(), &MeanTrainer).unwrap();
        assert_eq!(cc.residuals(), &[0.0, 1.5, 1.5]);
    }

    #[test]
    fn constant_trainer_equal_magnitudes() {
        let r = 0.7;
        let d = Dataset::from_pairs(&[(0.0, r), (1.0, -r), (2.0, r), (3.0, -r), (4.0, r)]).unwrap();
        let n = 5;
        // Ranks stay within 1..=n whenever 1/(n+1) <= alpha < n/(n+1), and
        // every S- element is -r, every S+ element is r.
        for i in 1..n {
            let alpha = i as f64 / (n + 1) as f64 + 0.01;
            if alpha > 0.5 {
                continue;
            }
            let reg = jackknife_plus(&d, &[0.5], alpha, &Zero).unwrap();
            assert_eq!(reg, IntervalRegion::Interval { lo: -r, hi: r }, "alpha {alpha}");
        }
        assert_eq!(
            jackknife_plus(&d, &[0.5], 1.0 / 6.0, &Zero).unwrap(),
            IntervalRegion::Interval { lo: -r, hi: r }
        );
    }

    #[test]
    fn tiny_alpha_is_unbounded() {
        let pairs: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, (i % 3) as f64)).collect();
        let d = Dataset::from_pairs(&pairs).unwrap();
        assert_eq!(
            jackknife_plus(&d, &[0.0], 0.01, &MeanTrainer).unwrap(),
            IntervalRegion::everything()
        );
        assert_eq!(
            jackknife_baseline(&d, &[0.0], 0.01, &MeanTrainer).unwrap(),
            IntervalRegion::everything()
        );
    }

    #[test]
    fn inflation_examples() {
        let d = hand3();
        assert_eq!(
            jackknife_plus_inflated(&d, &[0.0], 0.5, 0.0, &MeanTrainer).unwrap(),
            jackknife_plus(&d, &[0.0], 0.5, &MeanTrainer).unwrap()
        );
        assert_eq!(
            jackknife_plus_inflated(&d, &[0.0], 0.5, 0.5, &MeanTrainer).unwrap(),
            IntervalRegion::Interval { lo: -1.5, hi: 1.5 }
        );
        assert!(jackknife_plus_inflated(&d, &[0.0], 0.5, -0.1, &MeanTrainer).is_err());
        // degenerate [c, c]
        let z = Dataset::from_pairs(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        assert_eq!(
            jackknife_plus_inflated(&z, &[0.0], 0.5, 0.25, &Zero).unwrap(),
            IntervalRegion::Interval { lo: -0.25, hi: 0.25 }
        );
    }

    #[test]
    fn baseline_examples() {
        assert_eq!(
            jackknife_baseline(&hand3(), &[0.0], 0.5, &MeanTrainer).unwrap(),
            IntervalRegion::Interval { lo: -1.5, hi: 1.5 }
        );
        let flat = Dataset::from_pairs(&[(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)]).unwrap();
        assert_eq!(
            jackknife_baseline(&flat, &[0.0], 0.5, &MeanTrainer).unwrap(),
            IntervalRegion::Interval { lo: 2.0, hi: 2.0 }
        );
    }

    #[test]
    fn cv_plus_with_n_folds_is_jackknife_plus() {
        let d = Dataset::from_pairs(&[(0.1, 0.3), (0.5, -0.2), (-0.4, 0.9), (0.8, 0.1)]).unwrap();
        for alpha in [0.2, 0.3, 0.45] {
            assert_eq!(
                cv_plus(&d, &[0.2], alpha, 4, &MeanTrainer).unwrap(),
                jackknife_plus(&d, &[0.2], alpha, &MeanTrainer).unwrap()
            );
        }
    }

    // Brute-force fold oracle: K = 2, n = 4, mean-of-y trainer.
    #[test]
    fn cv_plus_two_folds_hand_oracle() {
        let ys = [0.0, 2.0, -1.0, 3.0];
        let d = Dataset::from_pairs(&[(0.0, ys[0]), (0.0, ys[1]), (0.0, ys[2]), (0.0, ys[3])]).unwrap();
        // fold 0 = {0, 1}, fold 1 = {2, 3}; model trained without fold 0 is
        // mean(-1, 3) = 1, without fold 1 is mean(0, 2) = 1.
        let preds = [1.0, 1.0, 1.0, 1.0];
        let res: Vec<f64> = ys.iter().zip(preds).map(|(y, p)| (y - p).abs()).collect();
        assert_eq!(res, vec![1.0, 1.0, 2.0, 2.0]);
        let mut lower: Vec<f64> = res.iter().map(|r| 1.0 - r).collect();
        let mut upper: Vec<f64> = res.iter().map(|r| 1.0 + r).collect();
        lower.sort_by(f64::total_cmp);
        upper.sort_by(f64::total_cmp);
        // alpha = 0.4, n = 4: lower rank floor(2) = 2, upper rank ceil(3) = 3
        let expected = IntervalRegion::Interval { lo: lower[1], hi: upper[2] };
        assert_eq!(expected, IntervalRegion::Interval { lo: -1.0, hi: 3.0 });
        assert_eq!(cv_plus(&d, &[0.0], 0.4, 2, &MeanTrainer).unwrap(), expected);
    }

    #[test]
    fn cv_plus_within_fold_permutation_invariant() {
        let a = Dataset::from_pairs(&[(0.1, 0.3), (0.5, -0.2), (-0.4, 0.9), (0.8, 0.1)]).unwrap();
        let b = Dataset::from_pairs(&[(0.5, -0.2), (0.1, 0.3), (0.8, 0.1), (-0.4, 0.9)]).unwrap();
        let cfg = crate::RidgeConfig::per_sample(0.5).unwrap();
        let ra = cv_plus(&a, &[0.3], 0.3, 2, &cfg).unwrap();
        let rb = cv_plus(&b, &[0.3], 0.3, 2, &cfg).unwrap();
        let ((l1, h1), (l2, h2)) = (ra.endpoints().unwrap(), rb.endpoints().unwrap());
        assert!((l1 - l2).abs() < 1e-12 && (h1 - h2).abs() < 1e-12);
    }

    #[test]
    fn cv_plus_rejects_uneven_folds() {
        let d = hand3();
        assert!(cv_plus(&d, &[0.0], 0.3, 2, &MeanTrainer).is_err());
        assert!(cv_plus(&d, &[0.0], 0.3, 1, &MeanTrainer).is_err());
        assert_eq!(fold_assignment(6, 3).unwrap(), vec![0, 0, 1, 1, 2, 2]);
    }
}
