//! Dense helpers for the small symmetric systems ridge needs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Row-major square symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SymMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn scaled_identity(dim: usize, diag: f64) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = diag;
        }
        Self { dim, data }
    }

    /// `self += w * x xᵀ`
    pub fn rank_one_update(&mut self, x: &[f64], w: f64) {
        let d = self.dim;
        for i in 0..d {
            let xi = w * x[i];
            for j in 0..d {
                self.data[i * d + j] += xi * x[j];
            }
        }
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let d = a.dim;
        let mut l = vec![0.0; d * d];
        for j in 0..d {
            let mut diag = a.data[j * d + j];
            for k in 0..j {
                diag -= l[j * d + k] * l[j * d + k];
            }
            if !(diag > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = libm::sqrt(diag);
            l[j * d + j] = ljj;
            for i in (j + 1)..d {
                let mut s = a.data[i * d + j];
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k];
                }
                l[i * d + j] = s / ljj;
            }
        }
        Ok(Self { dim: d, lower: l })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let l = &self.lower;
        let mut z = rhs.to_vec();
        for i in 0..d {
            let mut s = z[i];
            for k in 0..i {
                s -= l[i * d + k] * z[k];
            }
            z[i] = s / l[i * d + i];
        }
        for i in (0..d).rev() {
            let mut s = z[i];
            for k in (i + 1)..d {
                s -= l[k * d + i] * z[k];
            }
            z[i] = s / l[i * d + i];
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        // [[4,2],[2,3]] x = [2,1] -> x = [0.5, 0]
        let a = SymMatrix {
            dim: 2,
            data: vec![4.0, 2.0, 2.0, 3.0],
        };
        let x = Cholesky::factor(&a).unwrap().solve(&[2.0, 1.0]);
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite() {
        let a = SymMatrix {
            dim: 2,
            data: vec![1.0, 2.0, 2.0, 1.0],
        };
        assert_eq!(Cholesky::factor(&a).unwrap_err(), Error::NotPositiveDefinite);
    }
}
