//! Spectral convolution on the dyad orbifold `C²_gamma = T²_gamma / S₂`.
//!
//! * [`periodicity`]: JND-tolerant logarithmic periodicity of intervals.
//! * [`geometry`]: fundamental domain and the Möbius strip model.
//! * [`basis`]: the symmetric Laplace eigenbasis.
//! * [`engine`]: Fourier transform, convolution, low-pass smoothing and
//!   Dirichlet energy over a sampled basis.
//! * [`mesh`], [`export`]: PLY, CSV and JSON-lines outputs.

pub mod basis;
pub mod engine;
pub mod error;
pub mod export;
pub mod field;
pub mod geometry;
pub mod mesh;
pub mod periodicity;

pub use basis::{BasisSpec, ModeKind, SampledBasis, SymmetricMode};
pub use engine::{FilterCoeffs, SpectrumCoeffs};
pub use error::{Error, Result};
pub use field::GridField;
pub use geometry::{DyadPoint, EmbeddedPoint3D, StripCoords};
pub use periodicity::{Cents, PeriodicityConfig, RationalRatio};
