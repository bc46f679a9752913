//! Fourier analysis and synthesis against a sampled orthonormal basis, and
//! the spectral convolution built from them:
//!
//! ```text
//! f_hat(k) = <f, psi_k>,    f * g = F^-1( F(f) . F(g) )
//! ```
//!
//! where `.` is the pointwise product of coefficient sequences. The engine
//! only needs an orthonormal list of sampled eigenfunctions and their
//! eigenvalues; [`SampledBasis`] supplies the dyad-orbifold one.
//!
//! Integrals use the rectangle rule on the uniform torus grid, halved for
//! the orbifold measure. It is exact for products of modes below the
//! Nyquist limit, which `SampledBasis` enforces.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisSpec, SampledBasis};
use crate::error::{Error, Result};
use crate::field::GridField;

/// Orbifold quadrature weight of one grid node, `(1/2) (gamma / n)²`.
pub fn quadrature_weight(gamma: f64, n: usize) -> f64 {
    let h = gamma / n as f64;
    0.5 * h * h
}

/// Orbifold inner product `(1/2) (gamma/n)² sum f[i][j] g[i][j]`.
pub fn inner_product(f: &GridField, g: &GridField) -> Result<f64> {
    f.check_same_geometry(g)?;
    let dot: f64 = f
        .as_slice()
        .iter()
        .zip(g.as_slice())
        .map(|(a, b)| a * b)
        .sum();
    Ok(quadrature_weight(f.gamma(), f.n()) * dot)
}

/// Orbifold L² norm.
pub fn l2_norm(f: &GridField) -> f64 {
    inner_product(f, f).expect("same field").sqrt()
}

/// Fourier coefficients against an ordered basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCoeffs {
    pub basis: BasisSpec,
    pub coeffs: Vec<f64>,
}

impl SpectrumCoeffs {
    pub fn new(basis: BasisSpec, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.n_modes {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for a basis of {} modes",
                coeffs.len(),
                basis.n_modes
            )));
        }
        if let Some(v) = coeffs.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                value: *v,
                expected: "finite coefficients",
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: BasisSpec) -> Self {
        Self {
            basis,
            coeffs: vec![0.0; basis.n_modes],
        }
    }

    /// Unit vector `e_k`.
    pub fn unit(basis: BasisSpec, k: usize) -> Result<Self> {
        let mut c = Self::zeros(basis);
        let len = c.coeffs.len();
        *c.coeffs
            .get_mut(k)
            .ok_or(Error::OutOfRange { index: k, len })? = 1.0;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Pointwise product with another coefficient sequence.
    pub fn hadamard(&self, other: &[f64]) -> Result<Self> {
        if other.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "pointwise product of {} and {} coefficients",
                self.len(),
                other.len()
            )));
        }
        let coeffs = self.coeffs.iter().zip(other).map(|(a, b)| a * b).collect();
        Ok(Self {
            basis: self.basis,
            coeffs,
        })
    }

    /// Keeps the coefficients with index `<= n_cut`.
    pub fn truncated(&self, n_cut: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k <= n_cut { c } else { 0.0 })
            .collect();
        Self {
            basis: self.basis,
            coeffs,
        }
    }

    /// Sum of squared coefficients.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Evaluates the expansion `sum_k c_k psi_k(x, y)` at an arbitrary point.
    pub fn evaluate_at(&self, basis: &SampledBasis, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(basis.modes())
            .map(|(c, m)| c * m.evaluate(x, y))
            .sum()
    }
}

/// Spectral filter coefficients; the low-pass filter `g_n` is 1 up to the
/// cut and 0 beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterCoeffs {
    pub values: Vec<f64>,
}

impl FilterCoeffs {
    /// Index of the last retained mode.
    pub fn cutoff(&self) -> Option<usize> {
        self.values.iter().rposition(|&v| v != 0.0)
    }
}

/// `g_n` with `g_n(k) = 1` for `k <= n_cut`, else 0.
pub fn lowpass_coeffs(n_cut: usize, basis_len: usize) -> Result<FilterCoeffs> {
    if n_cut >= basis_len {
        return Err(Error::OutOfRange {
            index: n_cut,
            len: basis_len,
        });
    }
    let values = (0..basis_len)
        .map(|k| if k <= n_cut { 1.0 } else { 0.0 })
        .collect();
    Ok(FilterCoeffs { values })
}

/// `f_hat(k) = <f, psi_k>` for every mode of `basis`.
pub fn forward_transform(f: &GridField, basis: &SampledBasis) -> Result<SpectrumCoeffs> {
    basis.check_field(f)?;
    f.check_symmetric()?;
    let w = quadrature_weight(basis.gamma(), basis.grid());
    let values = f.as_slice();
    let coeffs: Vec<f64> = (0..basis.len())
        .into_par_iter()
        .map(|k| {
            let dot: f64 = basis
                .mode_samples(k)
                .iter()
                .zip(values)
                .map(|(a, b)| a * b)
                .sum();
            w * dot
        })
        .collect();
    SpectrumCoeffs::new(*basis.spec(), coeffs)
}

/// Synthesis `sum_k c[k] psi_k` on the basis grid.
pub fn inverse_transform(c: &SpectrumCoeffs, basis: &SampledBasis) -> Result<GridField> {
    if c.len() != basis.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coefficients for a basis of {} modes",
            c.len(),
            basis.len()
        )));
    }
    let n = basis.grid();
    let mut out = vec![0.0; n * n];
    // Each node accumulates over k in order, independent of the row split.
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (k, &ck) in c.coeffs.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            let src = &basis.mode_samples(k)[i * n..(i + 1) * n];
            for (o, s) in row.iter_mut().zip(src) {
                *o += ck * s;
            }
        }
    });
    let samples = Array2::from_shape_vec((n, n), out)
        .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    GridField::new(basis.gamma(), samples)
}

/// Spectral convolution `F^-1(F(f) . F(g))`.
pub fn convolve(f: &GridField, g: &GridField, basis: &SampledBasis) -> Result<GridField> {
    f.check_same_geometry(g)?;
    let fh = forward_transform(f, basis)?;
    let gh = forward_transform(g, basis)?;
    inverse_transform(&fh.hadamard(&gh.coeffs)?, basis)
}

/// Convolution with a filter given by its coefficients.
pub fn apply_filter(
    f: &GridField,
    filter: &FilterCoeffs,
    basis: &SampledBasis,
) -> Result<GridField> {
    let fh = forward_transform(f, basis)?;
    inverse_transform(&fh.hadamard(&filter.values)?, basis)
}

/// The filter function `g_n = sum_{k <= n_cut} psi_k` sampled on the grid.
pub fn lowpass_filter_field(n_cut: usize, basis: &SampledBasis) -> Result<GridField> {
    let g = lowpass_coeffs(n_cut, basis.len())?;
    inverse_transform(&SpectrumCoeffs::new(*basis.spec(), g.values)?, basis)
}

/// Low-pass smoothing `f * g_n`: orthogonal projection onto
/// `span{psi_0, ..., psi_n_cut}`.
pub fn smooth(f: &GridField, n_cut: usize, basis: &SampledBasis) -> Result<GridField> {
    let filter = lowpass_coeffs(n_cut, basis.len())?;
    apply_filter(f, &filter, basis)
}

/// Dirichlet energy from coefficients, `sum_k lambda_k c_k²`.
pub fn dirichlet_energy_coeffs(c: &SpectrumCoeffs, basis: &SampledBasis) -> Result<f64> {
    if c.len() != basis.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coefficients for a basis of {} modes",
            c.len(),
            basis.len()
        )));
    }
    Ok(c.coeffs
        .iter()
        .zip(basis.modes())
        .map(|(ck, m)| m.eigenvalue * ck * ck)
        .sum())
}

/// Dirichlet energy `integral |grad f|²`, computed spectrally over the
/// supplied basis. Components of `f` outside the basis are not counted, so
/// the value is a lower bound unless `f` is band-limited to the basis.
pub fn dirichlet_energy(f: &GridField, basis: &SampledBasis) -> Result<f64> {
    dirichlet_energy_coeffs(&forward_transform(f, basis)?, basis)
}

/// Five-point periodic finite-difference approximation of `-Laplacian f`.
pub fn negative_laplacian_fd(f: &GridField) -> GridField {
    let h2 = f.spacing() * f.spacing();
    GridField::from_index_fn(f.gamma(), f.n(), |i, j| {
        let (i, j) = (i as isize, j as isize);
        let centre = f.get_wrapped(i, j);
        let nb = f.get_wrapped(i + 1, j)
            + f.get_wrapped(i - 1, j)
            + f.get_wrapped(i, j + 1)
            + f.get_wrapped(i, j - 1);
        (4.0 * centre - nb) / h2
    })
    .expect("finite differences of finite samples are finite")
}

/// Gram matrix `G[i][j] = <psi_i, psi_j>` of the sampled basis.
pub fn gram_matrix(basis: &SampledBasis) -> Array2<f64> {
    let s = basis.sample_matrix();
    s.dot(&s.t()) * quadrature_weight(basis.gamma(), basis.grid())
}
