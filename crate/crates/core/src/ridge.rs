//! Closed-form ridge regression, leave-one-out refits and the ridge
//! stability constants.

use alloc::vec::Vec;

use crate::data::{DataPoint, Dataset};
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, Cholesky, SymMatrix};
use crate::stability::StabilityProfile;
use crate::trainer::{Predictor, Trainer};

/// Largest feature dimension the direct solver accepts.
pub const MAX_DIM: usize = 64;

/// How `lambda` enters the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Parameterization {
    /// `(1/n) Σ (y_i - βᵀx_i)² + λ |β|²`; normal equations use `nλ`.
    PerSample,
    /// `Σ (y_i - βᵀx_i)² + λ |β|²`.
    FixedTotal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct RidgeConfig {
    pub lambda: f64,
    pub parameterization: Parameterization,
}

impl RidgeConfig {
    pub fn new(lambda: f64, parameterization: Parameterization) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "must be positive and finite"));
        }
        Ok(Self {
            lambda,
            parameterization,
        })
    }

    pub fn per_sample(lambda: f64) -> Result<Self> {
        Self::new(lambda, Parameterization::PerSample)
    }

    pub fn fixed_total(lambda: f64) -> Result<Self> {
        Self::new(lambda, Parameterization::FixedTotal)
    }

    /// Diagonal shift added to `XᵀX` for a fit on `n` points.
    pub fn ridge_shift(&self, n: usize) -> f64 {
        match self.parameterization {
            Parameterization::PerSample => n as f64 * self.lambda,
            Parameterization::FixedTotal => self.lambda,
        }
    }
}

/// Fitted linear predictor `x ↦ βᵀx`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RidgeModel {
    pub beta: Vec<f64>,
    pub lambda: f64,
    pub parameterization: Parameterization,
    pub n_fit: usize,
}

impl RidgeModel {
    pub fn config(&self) -> RidgeConfig {
        RidgeConfig {
            lambda: self.lambda,
            parameterization: self.parameterization,
        }
    }

    pub fn predict_checked(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.beta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.beta.len(),
                got: x.len(),
            });
        }
        Ok(dot(&self.beta, x))
    }
}

impl Predictor for RidgeModel {
    fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.beta.len());
        dot(&self.beta, x)
    }
}

pub(crate) fn check_points(points: &[DataPoint]) -> Result<usize> {
    let p = points.first().ok_or(Error::Empty("training set"))?.dim();
    if p == 0 || p > MAX_DIM {
        return Err(invalid("p", alloc::format!("must be in 1..={MAX_DIM}, got {p}")));
    }
    for pt in points {
        if pt.dim() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: pt.dim(),
            });
        }
        if !pt.y.is_finite() || pt.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training set"));
        }
    }
    Ok(p)
}

/// `(XᵀX + shift·I, Xᵀy)`.
pub(crate) fn normal_equations(points: &[DataPoint], p: usize, shift: f64) -> (SymMatrix, Vec<f64>) {
    let mut gram = SymMatrix::scaled_identity(p, shift);
    let mut xty = alloc::vec![0.0; p];
    for pt in points {
        gram.rank_one_update(&pt.x, 1.0);
        for (acc, xi) in xty.iter_mut().zip(&pt.x) {
            *acc += xi * pt.y;
        }
    }
    (gram, xty)
}

/// Ridge fit on raw points (no domain check).
pub fn fit_points(points: &[DataPoint], config: &RidgeConfig) -> Result<RidgeModel> {
    let p = check_points(points)?;
    let (gram, xty) = normal_equations(points, p, config.ridge_shift(points.len()));
    let beta = Cholesky::factor(&gram)?.solve(&xty);
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("beta"));
    }
    Ok(RidgeModel {
        beta,
        lambda: config.lambda,
        parameterization: config.parameterization,
        n_fit: points.len(),
    })
}

pub fn fit(dataset: &Dataset, config: &RidgeConfig) -> Result<RidgeModel> {
    fit_points(dataset.points(), config)
}

pub fn predict(model: &RidgeModel, x: &[f64]) -> Result<f64> {
    model.predict_checked(x)
}

impl Trainer for RidgeConfig {
    type Model = RidgeModel;

    fn train(&self, points: &[DataPoint]) -> Result<RidgeModel> {
        fit_points(points, self)
    }
}

/// Leave-one-out refitting strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LooMethod {
    Naive,
    /// Rank-one downdate of the full fit. Only exact for
    /// [`Parameterization::FixedTotal`]: under per-sample scaling the ridge
    /// shift also changes when a point is removed.
    Fast,
}

/// The `n` models fitted with point `i` removed, in order.
pub fn loo_models(dataset: &Dataset, config: &RidgeConfig, method: LooMethod) -> Result<Vec<RidgeModel>> {
    let points = dataset.points();
    if points.len() < 2 {
        return Err(invalid("n", "leave-one-out needs at least two points"));
    }
    match method {
        LooMethod::Naive => (0..points.len())
            .map(|i| fit_points(&drop_index(points, i), config))
            .collect(),
        LooMethod::Fast => {
            if config.parameterization != Parameterization::FixedTotal {
                return Err(invalid(
                    "method",
                    "fast leave-one-out requires the fixed-total parameterization",
                ));
            }
            fast_loo(points, config)
        }
    }
}

pub(crate) fn drop_index(points: &[DataPoint], i: usize) -> Vec<DataPoint> {
    let mut out = Vec::with_capacity(points.len() - 1);
    out.extend_from_slice(&points[..i]);
    out.extend_from_slice(&points[i + 1..]);
    out
}

// β₋ᵢ = β − A⁻¹xᵢ (yᵢ − xᵢᵀβ) / (1 − xᵢᵀA⁻¹xᵢ), with A = XᵀX + λI.
fn fast_loo(points: &[DataPoint], config: &RidgeConfig) -> Result<Vec<RidgeModel>> {
    let p = check_points(points)?;
    let (gram, xty) = normal_equations(points, p, config.lambda);
    let chol = Cholesky::factor(&gram)?;
    let beta = chol.solve(&xty);
    points
        .iter()
        .map(|pt| {
            let u = chol.solve(&pt.x);
            let leverage = dot(&pt.x, &u);
            let resid = pt.y - dot(&pt.x, &beta);
            let scale = resid / (1.0 - leverage);
            let b: Vec<f64> = beta.iter().zip(&u).map(|(b, u)| b - u * scale).collect();
            Ok(RidgeModel {
                beta: b,
                lambda: config.lambda,
                parameterization: config.parameterization,
                n_fit: points.len() - 1,
            })
        })
        .collect()
}

/// Stability constants of per-sample ridge on `{|x| <= b} × [-B, B]`:
/// `c_n = 16 b² B² / (λ n)`, `kappa1 = b`, `kappa2 = √p b`. The density
/// bound is left for the data generator to supply.
pub fn stability_constants(
    p: usize,
    feature_radius: f64,
    response_bound: f64,
    lambda: f64,
    parameterization: Parameterization,
) -> Result<StabilityProfile> {
    if p == 0 {
        return Err(invalid("p", "must be positive"));
    }
    for (name, v) in [
        ("feature_radius", feature_radius),
        ("response_bound", response_bound),
        ("lambda", lambda),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(name, "must be positive and finite"));
        }
    }
    if parameterization != Parameterization::PerSample {
        return Err(invalid(
            "parameterization",
            "the 1/n stability constant is only certified for per-sample regularization",
        ));
    }
    let b2 = feature_radius * feature_radius;
    let big_b2 = response_bound * response_bound;
    Ok(StabilityProfile {
        p,
        feature_radius,
        response_bound,
        lambda,
        c_scale: 16.0 * b2 * big_b2 / lambda,
        kappa1: feature_radius,
        kappa2: libm::sqrt(p as f64) * feature_radius,
        density_bound: None,
        certified: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Domain;
    use alloc::vec;

    fn pairs(v: &[(f64, f64)]) -> Dataset {
        Dataset::from_pairs(v).unwrap()
    }

    #[test]
    fn fit_hand_example() {
        let d = pairs(&[(1.0, 1.0), (-1.0, -1.0)]);
        let m = fit(&d, &RidgeConfig::per_sample(1.0).unwrap()).unwrap();
        assert!((m.beta[0] - 0.5).abs() < 1e-15);
        assert_eq!(m.n_fit, 2);
    }

    #[test]
    fn zero_response_gives_zero_beta() {
        let pts = vec![
            DataPoint::new(vec![0.3, -0.2], 0.0).unwrap(),
            DataPoint::new(vec![0.1, 0.5], 0.0).unwrap(),
        ];
        let d = Dataset::new(pts, Domain::unbounded()).unwrap();
        let m = fit(&d, &RidgeConfig::per_sample(0.5).unwrap()).unwrap();
        assert!(m.beta.iter().all(|b| *b == 0.0));
    }

    #[test]
    fn predict_examples() {
        let m = RidgeModel {
            beta: vec![0.5],
            lambda: 1.0,
            parameterization: Parameterization::PerSample,
            n_fit: 2,
        };
        assert_eq!(predict(&m, &[2.0]).unwrap(), 1.0);
        assert!(predict(&m, &[1.0, 2.0]).is_err());
        let z = RidgeModel {
            beta: vec![0.0, 0.0],
            ..m.clone()
        };
        assert_eq!(predict(&z, &[3.0, -7.0]).unwrap(), 0.0);
        let c = RidgeModel {
            beta: vec![1.0, -1.0],
            ..m
        };
        assert_eq!(predict(&c, &[0.3, 0.3]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RidgeConfig::per_sample(0.0).is_err());
        assert!(RidgeConfig::per_sample(f64::NAN).is_err());
        let mixed = vec![
            DataPoint::new(vec![1.0], 1.0).unwrap(),
            DataPoint::new(vec![1.0, 2.0], 1.0).unwrap(),
        ];
        assert!(matches!(
            fit_points(&mixed, &RidgeConfig::per_sample(1.0).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(fit_points(&[], &RidgeConfig::per_sample(1.0).unwrap()).is_err());
    }

    #[test]
    fn fast_loo_hand_example() {
        let d = pairs(&[(1.0, 1.0), (-1.0, -1.0)]);
        let cfg = RidgeConfig::fixed_total(1.0).unwrap();
        for method in [LooMethod::Naive, LooMethod::Fast] {
            let ms = loo_models(&d, &cfg, method).unwrap();
            assert!((ms[0].beta[0] - 0.5).abs() < 1e-15);
            assert!((ms[1].beta[0] - 0.5).abs() < 1e-15);
            assert_eq!(ms[0].n_fit, 1);
        }
    }

    #[test]
    fn fast_loo_rejected_for_per_sample() {
        let d = pairs(&[(1.0, 1.0), (-1.0, -1.0)]);
        let cfg = RidgeConfig::per_sample(1.0).unwrap();
        assert!(loo_models(&d, &cfg, LooMethod::Fast).is_err());
        assert!(loo_models(&pairs(&[(1.0, 1.0)]), &cfg, LooMethod::Naive).is_err());
    }

    #[test]
    fn naive_loo_is_fit_on_dropped_data() {
        let d = pairs(&[(0.2, 0.1), (-0.7, 0.4), (0.9, -0.3), (0.5, 0.5)]);
        let cfg = RidgeConfig::per_sample(0.3).unwrap();
        let ms = loo_models(&d, &cfg, LooMethod::Naive).unwrap();
        for (i, m) in ms.iter().enumerate() {
            let refit = fit_points(&drop_index(d.points(), i), &cfg).unwrap();
            assert_eq!(m, &refit);
        }
    }

    #[test]
    fn stability_constant_examples() {
        let s = stability_constants(1, 1.0, 1.0, 1.0, Parameterization::PerSample).unwrap();
        assert_eq!(s.c(16), 1.0);
        let s = stability_constants(4, 2.0, 1.0, 0.7, Parameterization::PerSample).unwrap();
        assert_eq!(s.kappa1, 2.0);
        assert_eq!(s.kappa2, 4.0);
        for n in 1..200 {
            assert!((s.c(2 * n) - s.c(n) / 2.0).abs() <= 1e-15 * s.c(n));
        }
        assert!(s.density_bound.is_none());
        assert!(stability_constants(0, 1.0, 1.0, 1.0, Parameterization::PerSample).is_err());
        assert!(stability_constants(1, -1.0, 1.0, 1.0, Parameterization::PerSample).is_err());
        assert!(stability_constants(1, 1.0, 1.0, 1.0, Parameterization::FixedTotal).is_err());
    }
}
