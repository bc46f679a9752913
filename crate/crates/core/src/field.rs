use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Real samples on the uniform `n x n` torus grid with nodes
/// `(gamma * i / n, gamma * j / n)`; `samples[[i, j]]` is the value at
/// `x = gamma * i / n`, `y = gamma * j / n`.
///
/// Swap-symmetric fields are functions on the orbifold; transforms check
/// that before using a field.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    gamma: f64,
    samples: Array2<f64>,
}

impl GridField {
    pub fn new(gamma: f64, samples: Array2<f64>) -> Result<Self> {
        check_gamma(gamma)?;
        let (rows, cols) = samples.dim();
        if rows != cols || rows == 0 {
            return Err(Error::ShapeMismatch(format!(
                "grid must be square and non-empty, got {rows}x{cols}"
            )));
        }
        if let Some(v) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                value: *v,
                expected: "finite samples",
            });
        }
        Ok(Self { gamma, samples })
    }

    pub fn zeros(gamma: f64, n: usize) -> Result<Self> {
        Self::new(gamma, Array2::zeros((n, n)))
    }

    /// Samples `f(i, j)` at every node index pair.
    pub fn from_index_fn(
        gamma: f64,
        n: usize,
        f: impl Fn(usize, usize) -> f64 + Sync,
    ) -> Result<Self> {
        let values: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|p| f(p / n, p % n))
            .collect();
        let samples = Array2::from_shape_vec((n, n), values)
            .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        Self::new(gamma, samples)
    }

    /// Samples `f(x, y)` at the grid nodes.
    pub fn from_fn(gamma: f64, n: usize, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<Self> {
        let h = gamma / n as f64;
        Self::from_index_fn(gamma, n, |i, j| f(h * i as f64, h * j as f64))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Nodes per axis.
    pub fn n(&self) -> usize {
        self.samples.nrows()
    }

    pub fn spacing(&self) -> f64 {
        self.gamma / self.n() as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.spacing() * i as f64
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.samples[[i, j]]
    }

    /// Value at node indices taken modulo `n`.
    pub fn get_wrapped(&self, i: isize, j: isize) -> f64 {
        let n = self.n() as isize;
        self.samples[[i.rem_euclid(n) as usize, j.rem_euclid(n) as usize]]
    }

    pub fn as_slice(&self) -> &[f64] {
        self.samples
            .as_slice()
            .expect("grid samples are stored contiguously")
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_geometry(other)?;
        Ok(self
            .samples
            .iter()
            .zip(other.samples.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn min_value(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact check of `samples[i][j] == samples[j][i]`.
    pub fn check_symmetric(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in 0..i {
                if self.samples[[i, j]] != self.samples[[j, i]] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn is_swap_symmetric(&self) -> bool {
        self.check_symmetric().is_ok()
    }

    pub fn check_same_geometry(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() || self.gamma != other.gamma {
            return Err(Error::ShapeMismatch(format!(
                "fields on {}x{} (gamma {}) and {}x{} (gamma {})",
                self.n(),
                self.n(),
                self.gamma,
                other.n(),
                other.n(),
                other.gamma
            )));
        }
        Ok(())
    }

    /// `alpha * self + other`.
    pub fn scaled_add(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_same_geometry(other)?;
        Self::new(self.gamma, &self.samples * alpha + &other.samples)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_geometry(other)?;
        Self::new(self.gamma, &self.samples - &other.samples)
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            value: gamma,
            expected: "period gamma > 0",
        })
    }
}
