//! Labelled observations and the bounded domain they live in.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::norm2;

/// Bounded sample space: features in the Euclidean ball of radius
/// `feature_radius`, responses in `[-response_bound, response_bound]`.
///
/// Infinite bounds are allowed and disable the corresponding check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Domain {
    pub feature_radius: f64,
    pub response_bound: f64,
}

impl Domain {
    pub fn new(feature_radius: f64, response_bound: f64) -> Result<Self> {
        if !(feature_radius > 0.0) {
            return Err(crate::error::invalid("feature_radius", "must be positive"));
        }
        if !(response_bound > 0.0) {
            return Err(crate::error::invalid("response_bound", "must be positive"));
        }
        Ok(Self {
            feature_radius,
            response_bound,
        })
    }

    /// A domain that accepts every finite point.
    pub fn unbounded() -> Self {
        Self {
            feature_radius: f64::INFINITY,
            response_bound: f64::INFINITY,
        }
    }

    fn check(&self, index: usize, point: &DataPoint) -> Result<()> {
        let norm = norm2(&point.x);
        if norm > self.feature_radius {
            return Err(Error::OutOfDomain {
                index,
                reason: format!("|x| = {norm} exceeds radius {}", self.feature_radius),
            });
        }
        if point.y.abs() > self.response_bound {
            return Err(Error::OutOfDomain {
                index,
                reason: format!("|y| = {} exceeds bound {}", point.y.abs(), self.response_bound),
            });
        }
        Ok(())
    }
}

/// One labelled observation `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DataPoint {
    pub x: Vec<f64>,
    pub y: f64,
}

impl DataPoint {
    /// Builds a point, rejecting non-finite coordinates. Domain membership is
    /// checked when the point enters a [`Dataset`].
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("x"));
        }
        if !y.is_finite() {
            return Err(Error::NonFinite("y"));
        }
        Ok(Self { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Non-empty ordered sample whose points share one dimension and lie in
/// `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<DataPoint>,
    domain: Domain,
}

impl Dataset {
    pub fn new(points: Vec<DataPoint>, domain: Domain) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("dataset"))?;
        let p = first.dim();
        if p == 0 {
            return Err(crate::error::invalid("x", "feature dimension must be at least 1"));
        }
        for (i, pt) in points.iter().enumerate() {
            if pt.dim() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: pt.dim(),
                });
            }
            if pt.x.iter().any(|v| !v.is_finite()) || !pt.y.is_finite() {
                return Err(Error::NonFinite("dataset"));
            }
            domain.check(i, pt)?;
        }
        Ok(Self { points, domain })
    }

    /// Convenience constructor for one-dimensional `(x, y)` pairs with no
    /// domain restriction.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let points = pairs
            .iter()
            .map(|&(x, y)| DataPoint::new(alloc::vec![x], y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, Domain::unbounded())
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn into_points(self) -> Vec<DataPoint> {
        self.points
    }

    /// Splits into the first `at` points and the rest.
    pub fn split_at(&self, at: usize) -> Result<(Dataset, Dataset)> {
        if at == 0 || at >= self.len() {
            return Err(crate::error::invalid("split", "both parts must be non-empty"));
        }
        let (a, b) = self.points.split_at(at);
        Ok((
            Dataset {
                points: a.to_vec(),
                domain: self.domain,
            },
            Dataset {
                points: b.to_vec(),
                domain: self.domain,
            },
        ))
    }
}
