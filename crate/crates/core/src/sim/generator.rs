//! Synthetic linear data with bounded features, bounded responses and a
//! known bound on the density of absolute residuals.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{DataPoint, Dataset, Domain};
use crate::error::{invalid, Result};
use crate::linalg::{dot, norm2};

use super::rng::{stream, SimRng, StreamRole};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Additive noise family.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields))]
pub enum Noise {
    /// Uniform on `(-half_width, half_width)`.
    Uniform { half_width: f64 },
    /// `N(0, sigma²)` conditioned on `|w| <= cut * sigma`.
    TruncatedGaussian { sigma: f64, cut: f64 },
}

impl Noise {
    fn validate(&self) -> Result<()> {
        match *self {
            Noise::Uniform { half_width } if half_width > 0.0 && half_width.is_finite() => Ok(()),
            Noise::TruncatedGaussian { sigma, cut }
                if sigma > 0.0 && sigma.is_finite() && cut > 0.0 && cut.is_finite() =>
            {
                Ok(())
            }
            _ => Err(invalid("noise", "scale parameters must be positive and finite")),
        }
    }

    /// Largest absolute value the noise can take.
    pub fn support(&self) -> f64 {
        match *self {
            Noise::Uniform { half_width } => half_width,
            Noise::TruncatedGaussian { sigma, cut } => sigma * cut,
        }
    }

    /// Standard deviation scale used to size full-conformal grids.
    pub fn scale(&self) -> f64 {
        match *self {
            Noise::Uniform { half_width } => half_width / libm::sqrt(3.0),
            Noise::TruncatedGaussian { sigma, .. } => sigma,
        }
    }

    fn peak_density(&self) -> f64 {
        match *self {
            Noise::Uniform { half_width } => 1.0 / (2.0 * half_width),
            Noise::TruncatedGaussian { sigma, cut } => INV_SQRT_2PI / (sigma * std_normal_mass(cut)),
        }
    }

    /// `P(lo <= w <= hi)`.
    fn mass(&self, lo: f64, hi: f64) -> f64 {
        let s = self.support();
        let (lo, hi) = (lo.max(-s), hi.min(s));
        if lo >= hi {
            return 0.0;
        }
        match *self {
            Noise::Uniform { half_width } => (hi - lo) / (2.0 * half_width),
            Noise::TruncatedGaussian { sigma, cut } => {
                (std_normal_cdf(hi / sigma) - std_normal_cdf(lo / sigma)) / std_normal_mass(cut)
            }
        }
    }

    fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            Noise::Uniform { half_width } => rng.random_range(-half_width..half_width),
            Noise::TruncatedGaussian { sigma, cut } => loop {
                let z: f64 = rng.sample(StandardNormal);
                if z.abs() <= cut {
                    return sigma * z;
                }
            },
        }
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / core::f64::consts::SQRT_2))
}

/// `P(|Z| <= cut)` for standard normal `Z`.
fn std_normal_mass(cut: f64) -> f64 {
    libm::erf(cut / core::f64::consts::SQRT_2)
}

/// `Y = θ*ᵀX + W` with `X` uniform on the radius-`b` ball, `W` drawn from
/// `noise` and redrawn until `|Y| <= B`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GeneratorSpec {
    pub p: usize,
    pub feature_radius: f64,
    pub response_bound: f64,
    pub theta_star: Vec<f64>,
    pub noise: Noise,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.theta_star.len() != self.p {
            return Err(invalid("theta_star", "length must equal p >= 1"));
        }
        Domain::new(self.feature_radius, self.response_bound)?;
        if !self.feature_radius.is_finite() || !self.response_bound.is_finite() {
            return Err(invalid("domain", "generator bounds must be finite"));
        }
        self.noise.validate()?;
        if !(self.signal_bound() < self.response_bound) {
            return Err(invalid(
                "theta_star",
                "|theta*| b must stay below the response bound",
            ));
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain {
        Domain {
            feature_radius: self.feature_radius,
            response_bound: self.response_bound,
        }
    }

    /// `|θ*| b`, the largest possible `|θ*ᵀx|`.
    pub fn signal_bound(&self) -> f64 {
        norm2(&self.theta_star) * self.feature_radius
    }

    /// Smallest probability, over `x`, that a noise draw keeps `|Y| <= B`.
    pub fn min_acceptance(&self) -> f64 {
        let s = self.signal_bound();
        let b = self.response_bound;
        self.noise.mass(-b - s, b - s)
    }

    /// Upper bound `L` on the density of `|Y - mu(X)|` for any fixed `mu`.
    ///
    /// Given `X`, the accepted noise has density at most
    /// `peak / min_acceptance`, a shift by `θ*ᵀX - mu(X)` keeps that bound,
    /// and folding at zero at most doubles it.
    pub fn density_bound(&self) -> f64 {
        2.0 * self.noise.peak_density() / self.min_acceptance()
    }

    pub fn sample_x(&self, rng: &mut SimRng) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..self.p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = norm2(&g);
            if !(norm > 0.0) {
                continue;
            }
            let u: f64 = rng.random();
            let r = self.feature_radius * libm::pow(u, 1.0 / self.p as f64);
            let x: Vec<f64> = g.iter().map(|v| v * (r / norm)).collect();
            if norm2(&x) <= self.feature_radius {
                return x;
            }
        }
    }

    pub fn sample_y(&self, x: &[f64], rng: &mut SimRng) -> f64 {
        let signal = dot(&self.theta_star, x);
        loop {
            let y = signal + self.noise.sample(rng);
            if y.abs() <= self.response_bound {
                return y;
            }
        }
    }

    pub fn sample_point(&self, rng: &mut SimRng) -> DataPoint {
        let x = self.sample_x(rng);
        let y = self.sample_y(&x, rng);
        DataPoint { x, y }
    }

    /// `n` i.i.d. points from `rng`.
    pub fn sample(&self, n: usize, rng: &mut SimRng) -> Result<Dataset> {
        self.validate()?;
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        let points = (0..n).map(|_| self.sample_point(rng)).collect();
        Dataset::new(points, self.domain())
    }
}

/// `n` points from the training stream of `seed`.
pub fn generate(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<Dataset> {
    spec.sample(n, &mut stream(seed, 0, StreamRole::Train))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec(noise: Noise) -> GeneratorSpec {
        GeneratorSpec {
            p: 2,
            feature_radius: 1.0,
            response_bound: 1.0,
            theta_star: vec![0.3, -0.2],
            noise,
        }
    }

    #[test]
    fn determinism_and_zero_n() {
        let s = spec(Noise::Uniform { half_width: 0.5 });
        assert_eq!(generate(&s, 50, 3).unwrap(), generate(&s, 50, 3).unwrap());
        assert_ne!(generate(&s, 50, 3).unwrap(), generate(&s, 50, 4).unwrap());
        assert!(generate(&s, 0, 3).is_err());
    }

    #[test]
    fn density_bound_families() {
        // no truncation possible: |θ*| b + a <= B
        let s = spec(Noise::Uniform { half_width: 0.5 });
        assert!(s.signal_bound() + 0.5 <= 1.0);
        assert_eq!(s.min_acceptance(), 1.0);
        assert_eq!(s.density_bound(), 2.0);
        let g = spec(Noise::TruncatedGaussian { sigma: 0.2, cut: 2.5 });
        let z = libm::erf(2.5 / core::f64::consts::SQRT_2);
        assert!((g.density_bound() - 2.0 * INV_SQRT_2PI / (0.2 * z)).abs() < 1e-12);
        // truncation by the response box raises the bound
        let wide = spec(Noise::Uniform { half_width: 1.5 });
        assert!(wide.min_acceptance() < 1.0);
        assert!(wide.density_bound() > 1.0 / 1.5);
    }

    #[test]
    fn validation() {
        let mut s = spec(Noise::Uniform { half_width: 0.5 });
        s.theta_star = vec![2.0, 0.0];
        assert!(s.validate().is_err());
        let mut s = spec(Noise::Uniform { half_width: -1.0 });
        assert!(s.validate().is_err());
        s.noise = Noise::Uniform { half_width: 0.1 };
        s.theta_star = vec![1.0];
        assert!(s.validate().is_err());
    }
}
