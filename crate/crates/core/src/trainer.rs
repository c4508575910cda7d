//! Symmetric training algorithms usable by every conformal construction.

use crate::data::DataPoint;
use crate::error::{Error, Result};

/// A fitted regression function.
pub trait Predictor {
    fn predict(&self, x: &[f64]) -> f64;
}

/// A training algorithm whose output does not depend on the order of the
/// training points.
pub trait Trainer {
    type Model: Predictor;

    fn train(&self, points: &[DataPoint]) -> Result<Self::Model>;
}

impl<T: Trainer + ?Sized> Trainer for &T {
    type Model = T::Model;

    fn train(&self, points: &[DataPoint]) -> Result<Self::Model> {
        (**self).train(points)
    }
}

/// Predicts the sample mean of the responses, ignoring `x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MeanTrainer;

/// Constant predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantModel(pub f64);

impl Predictor for ConstantModel {
    fn predict(&self, _x: &[f64]) -> f64 {
        self.0
    }
}

impl Trainer for MeanTrainer {
    type Model = ConstantModel;

    fn train(&self, points: &[DataPoint]) -> Result<ConstantModel> {
        if points.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let sum: f64 = points.iter().map(|p| p.y).sum();
        Ok(ConstantModel(sum / points.len() as f64))
    }
}
