//! Real orthonormal Laplace eigenbasis of the dyad orbifold `T²_gamma / S₂`.
//!
//! The torus carries the Fourier modes `exp(2 pi i (c1 x + c2 y) / gamma)`
//! with eigenvalue `(2 pi / gamma)² (c1² + c2²)`. Symmetrising them under the
//! coordinate swap and taking real parts groups the frequency lattice into
//! orbits `{(c1, c2), (c2, c1), (-c1, -c2), (-c2, -c1)}`. Each orbit is
//! labelled by its canonical representative with `c1 >= |c2|` and yields
//!
//! * `(0, 0)`: the constant mode,
//! * `c1 = c2`: a diagonal cosine and sine,
//! * `c1 = -c2`: a single cosine (its sine is antisymmetric and vanishes),
//! * otherwise: an off-diagonal cosine and sine.
//!
//! Every mode is `norm_const * (R trig)(x, y)` where `R` averages over the
//! swap, and `norm_const` makes the list orthonormal under the orbifold
//! inner product `<f, g> = 1/2 * integral over the torus of f g`.
//!
//! Modes are ordered by `c1² + c2²`, then by kind
//! (diagonal-cos, diagonal-sin, offdiag-cos, offdiag-sin), then by the
//! representative `(c1, c2)` lexicographically.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{check_gamma, GridField};

/// Default period: one octave in semitones.
pub const DEFAULT_GAMMA: f64 = 12.0;

/// Torus eigenvalue `(2 pi / gamma)² (c1² + c2²)`.
pub fn torus_eigenvalue(c1: i64, c2: i64, gamma: f64) -> f64 {
    let w = 2.0 * PI / gamma;
    w * w * (c1 * c1 + c2 * c2) as f64
}

/// A single complex torus mode, identified by its integer frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusMode {
    pub c1: i32,
    pub c2: i32,
    pub gamma: f64,
}

impl TorusMode {
    pub fn eigenvalue(&self) -> f64 {
        torus_eigenvalue(self.c1 as i64, self.c2 as i64, self.gamma)
    }

    /// Real and imaginary part of the mode at `(x, y)`.
    pub fn evaluate(&self, x: f64, y: f64) -> (f64, f64) {
        let theta = phase(self.c1, self.c2, x, y, self.gamma);
        (theta.cos(), theta.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    Constant,
    DiagonalCos,
    DiagonalSin,
    OffdiagCos,
    OffdiagSin,
}

impl ModeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeKind::Constant => "constant",
            ModeKind::DiagonalCos => "diagonal-cos",
            ModeKind::DiagonalSin => "diagonal-sin",
            ModeKind::OffdiagCos => "offdiag-cos",
            ModeKind::OffdiagSin => "offdiag-sin",
        }
    }

    fn is_sine(&self) -> bool {
        matches!(self, ModeKind::DiagonalSin | ModeKind::OffdiagSin)
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One real, swap-symmetric, orthonormal eigenfunction of the orbifold
/// Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMode {
    pub k: usize,
    pub kind: ModeKind,
    pub c1: i32,
    pub c2: i32,
    pub eigenvalue: f64,
    pub norm_const: f64,
    pub gamma: f64,
}

impl SymmetricMode {
    fn new(k: usize, kind: ModeKind, c1: i32, c2: i32, gamma: f64) -> Self {
        let norm_const = match kind {
            ModeKind::Constant => SQRT_2 / gamma,
            ModeKind::DiagonalCos | ModeKind::DiagonalSin => 2.0 / gamma,
            // Anti-diagonal orbits have only two lattice points.
            ModeKind::OffdiagCos if c1 == -c2 => 2.0 / gamma,
            ModeKind::OffdiagCos | ModeKind::OffdiagSin => 2.0 * SQRT_2 / gamma,
        };
        Self {
            k,
            kind,
            c1,
            c2,
            eigenvalue: torus_eigenvalue(c1 as i64, c2 as i64, gamma),
            norm_const,
            gamma,
        }
    }

    /// Largest absolute frequency along either axis.
    pub fn max_frequency(&self) -> u32 {
        self.c1.unsigned_abs().max(self.c2.unsigned_abs())
    }

    pub fn torus_mode(&self) -> TorusMode {
        TorusMode {
            c1: self.c1,
            c2: self.c2,
            gamma: self.gamma,
        }
    }

    /// Value of the mode at `(x, y)`.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        if self.kind == ModeKind::Constant {
            return self.norm_const;
        }
        let a = phase(self.c1, self.c2, x, y, self.gamma);
        let b = phase(self.c2, self.c1, x, y, self.gamma);
        let avg = if self.kind.is_sine() {
            0.5 * (a.sin() + b.sin())
        } else {
            0.5 * (a.cos() + b.cos())
        };
        self.norm_const * avg
    }

    /// Samples the mode at the nodes of an `n x n` grid.
    ///
    /// Phases are reduced as integers mod `n`, so the samples are exactly
    /// periodic and exactly swap-symmetric.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let table = TrigTable::new(n, self.kind.is_sine());
        let mut out = vec![0.0; n * n];
        self.sample_into(&table, &mut out);
        out
    }

    /// [`sample`](Self::sample) wrapped as a field.
    pub fn sample_field(&self, n: usize) -> Result<GridField> {
        let samples = Array2::from_shape_vec((n, n), self.sample(n))
            .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        GridField::new(self.gamma, samples)
    }

    fn sample_into(&self, table: &TrigTable, out: &mut [f64]) {
        let n = table.n;
        if self.kind == ModeKind::Constant {
            out.fill(self.norm_const);
            return;
        }
        let c1 = (self.c1 as i64).rem_euclid(n as i64) as usize;
        let c2 = (self.c2 as i64).rem_euclid(n as i64) as usize;
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            let (mut pa, mut pb) = ((c1 * i) % n, (c2 * i) % n);
            for value in row.iter_mut() {
                *value = self.norm_const * 0.5 * (table.values[pa] + table.values[pb]);
                pa += c2;
                if pa >= n {
                    pa -= n;
                }
                pb += c1;
                if pb >= n {
                    pb -= n;
                }
            }
        }
    }
}

fn phase(c1: i32, c2: i32, x: f64, y: f64, gamma: f64) -> f64 {
    2.0 * PI * (c1 as f64 * x + c2 as f64 * y) / gamma
}

struct TrigTable {
    n: usize,
    values: Vec<f64>,
}

impl TrigTable {
    fn new(n: usize, sine: bool) -> Self {
        let values = (0..n)
            .map(|m| {
                let t = 2.0 * PI * m as f64 / n as f64;
                if sine {
                    t.sin()
                } else {
                    t.cos()
                }
            })
            .collect();
        Self { n, values }
    }
}

/// How many modes to enumerate and on which period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub gamma: f64,
    pub n_modes: usize,
}

impl BasisSpec {
    pub fn new(gamma: f64, n_modes: usize) -> Result<Self> {
        check_gamma(gamma)?;
        if n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
        }
        Ok(Self { gamma, n_modes })
    }

    /// Human-readable ordering rule, recorded in run manifests.
    pub fn ordering_description() -> &'static str {
        "ascending c1^2+c2^2; ties by kind (constant, diagonal-cos, diagonal-sin, \
         offdiag-cos, offdiag-sin); then lexicographic (c1, c2) over canonical \
         representatives with c1 >= |c2|"
    }
}

/// Canonical representatives with `c1² + c2² = norm`, `c1 >= |c2|`, in
/// lexicographic order.
fn representatives(norm: i64) -> Vec<(i32, i32)> {
    let mut reps = Vec::new();
    let mut c1 = 0i64;
    while 2 * c1 * c1 < norm {
        c1 += 1;
    }
    while c1 * c1 <= norm {
        let rest = norm - c1 * c1;
        let c2 = (rest as f64).sqrt().round() as i64;
        if c2 * c2 == rest && c2 <= c1 {
            if c2 != 0 {
                reps.push((c1 as i32, -c2 as i32));
            }
            reps.push((c1 as i32, c2 as i32));
        }
        c1 += 1;
    }
    reps.sort_unstable();
    reps
}

/// The first `spec.n_modes` symmetric modes in basis order.
pub fn enumerate_basis(spec: &BasisSpec) -> Vec<SymmetricMode> {
    let gamma = spec.gamma;
    let mut modes = Vec::with_capacity(spec.n_modes);
    let mut norm = 0i64;
    while modes.len() < spec.n_modes {
        let mut shell: Vec<(ModeKind, i32, i32)> = Vec::new();
        for (c1, c2) in representatives(norm) {
            if norm == 0 {
                shell.push((ModeKind::Constant, 0, 0));
            } else if c1 == c2 {
                shell.push((ModeKind::DiagonalCos, c1, c2));
                shell.push((ModeKind::DiagonalSin, c1, c2));
            } else if c1 == -c2 {
                shell.push((ModeKind::OffdiagCos, c1, c2));
            } else {
                shell.push((ModeKind::OffdiagCos, c1, c2));
                shell.push((ModeKind::OffdiagSin, c1, c2));
            }
        }
        shell.sort_by_key(|&(kind, c1, c2)| (kind, c1, c2));
        for (kind, c1, c2) in shell {
            if modes.len() == spec.n_modes {
                break;
            }
            modes.push(SymmetricMode::new(modes.len(), kind, c1, c2, gamma));
        }
        norm += 1;
    }
    modes
}

/// Evaluates a mode; free-function form of [`SymmetricMode::evaluate`].
pub fn evaluate_mode(m: &SymmetricMode, x: f64, y: f64) -> f64 {
    m.evaluate(x, y)
}

/// Checks that every eigenvalue is `(2 pi / gamma)² (c1² + c2²)` for some
/// integers, i.e. that the listed spectrum lies inside the torus spectrum.
pub fn spectrum_inclusion_check(basis: &[SymmetricMode], gamma: f64) -> bool {
    let w = 2.0 * PI / gamma;
    basis.iter().all(|m| {
        let t = m.eigenvalue / (w * w);
        if !t.is_finite() || t < -1e-9 {
            return false;
        }
        let norm = t.round();
        (t - norm).abs() <= 1e-9 * norm.max(1.0) && is_sum_of_two_squares(norm as i64)
    })
}

fn is_sum_of_two_squares(n: i64) -> bool {
    let mut a = 0i64;
    while 2 * a * a <= n {
        let rest = n - a * a;
        let b = (rest as f64).sqrt().round() as i64;
        if b * b == rest {
            return true;
        }
        a += 1;
    }
    false
}

/// Swap symmetriser `(R f)(x, y) = (f(x, y) + f(y, x)) / 2`.
pub fn symmetrize(f: &GridField) -> GridField {
    let s = f.samples();
    let avg = Array2::from_shape_fn(s.dim(), |(i, j)| 0.5 * (s[[i, j]] + s[[j, i]]));
    GridField::new(f.gamma(), avg).expect("averaging preserves shape and finiteness")
}

/// Errors unless every mode is resolvable on an `n x n` grid, i.e. all
/// frequencies satisfy `|c| < n / 2`. Below that limit the rectangle rule
/// integrates every product of two modes exactly.
pub fn check_resolvable(basis: &[SymmetricMode], n: usize) -> Result<()> {
    match basis.iter().map(SymmetricMode::max_frequency).max() {
        Some(max_freq) if 2 * max_freq as usize >= n => Err(Error::Nyquist { max_freq, grid: n }),
        _ => Ok(()),
    }
}

/// Number of leading modes that are resolvable on an `n x n` grid.
pub fn resolvable_prefix(basis: &[SymmetricMode], n: usize) -> usize {
    basis
        .iter()
        .take_while(|m| 2 * (m.max_frequency() as usize) < n)
        .count()
}

/// A basis together with its samples on one grid, one row per mode.
#[derive(Debug, Clone)]
pub struct SampledBasis {
    spec: BasisSpec,
    n: usize,
    modes: Vec<SymmetricMode>,
    samples: Array2<f64>,
}

impl SampledBasis {
    /// Enumerates and samples the basis; refuses modes above the grid's
    /// Nyquist limit.
    pub fn new(spec: BasisSpec, n: usize) -> Result<Self> {
        let modes = enumerate_basis(&spec);
        Self::from_modes(spec, modes, n)
    }

    pub fn from_modes(spec: BasisSpec, modes: Vec<SymmetricMode>, n: usize) -> Result<Self> {
        check_gamma(spec.gamma)?;
        if n == 0 {
            return Err(Error::InvalidParameter("grid resolution must be positive".into()));
        }
        check_resolvable(&modes, n)?;
        let cos_table = TrigTable::new(n, false);
        let sin_table = TrigTable::new(n, true);
        let mut samples = Array2::zeros((modes.len(), n * n));
        samples
            .as_slice_mut()
            .expect("fresh array is contiguous")
            .par_chunks_mut(n * n)
            .zip(modes.par_iter())
            .for_each(|(row, mode)| {
                let table = if mode.kind.is_sine() { &sin_table } else { &cos_table };
                mode.sample_into(table, row);
            });
        Ok(Self {
            spec,
            n,
            modes,
            samples,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn gamma(&self) -> f64 {
        self.spec.gamma
    }

    /// Grid nodes per axis.
    pub fn grid(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[SymmetricMode] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }

    /// Flattened samples of mode `k`, row-major over `(i, j)`.
    pub fn mode_samples(&self, k: usize) -> &[f64] {
        let n2 = self.n * self.n;
        &self.samples.as_slice().expect("contiguous")[k * n2..(k + 1) * n2]
    }

    pub fn mode_field(&self, k: usize) -> Result<GridField> {
        if k >= self.len() {
            return Err(Error::OutOfRange {
                index: k,
                len: self.len(),
            });
        }
        let samples = Array2::from_shape_vec((self.n, self.n), self.mode_samples(k).to_vec())
            .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        GridField::new(self.gamma(), samples)
    }

    /// `modes x (n*n)` sample matrix.
    pub fn sample_matrix(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn check_field(&self, f: &GridField) -> Result<()> {
        if f.n() != self.n || f.gamma() != self.gamma() {
            return Err(Error::ShapeMismatch(format!(
                "field is {}x{} with gamma {}, basis is sampled on {}x{} with gamma {}",
                f.n(),
                f.n(),
                f.gamma(),
                self.n,
                self.n,
                self.gamma()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(torus_eigenvalue(0, 0, 12.0), 0.0);
        assert!((torus_eigenvalue(1, 0, 12.0) - PI * PI / 36.0).abs() < 1e-15);
        assert!((torus_eigenvalue(1, 0, 12.0) - 0.274_155_677_808_037_8).abs() < 1e-15);
        assert!((torus_eigenvalue(2, 1, 12.0) - 1.370_778_389_040_189).abs() < 1e-14);
    }

    #[test]
    fn single_mode_basis_is_constant() {
        let b = enumerate_basis(&BasisSpec::new(12.0, 1).unwrap());
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, ModeKind::Constant);
        assert_eq!(b[0].eigenvalue, 0.0);
        assert_eq!(b[0].evaluate(3.2, -7.0), SQRT_2 / 12.0);
    }

    #[test]
    fn leading_modes_follow_ordering_rule() {
        let b = enumerate_basis(&BasisSpec::new(12.0, 12).unwrap());
        let got: Vec<_> = b.iter().map(|m| (m.kind, m.c1, m.c2)).collect();
        use ModeKind::*;
        assert_eq!(
            got,
            vec![
                (Constant, 0, 0),
                (OffdiagCos, 1, 0),
                (OffdiagSin, 1, 0),
                (DiagonalCos, 1, 1),
                (DiagonalSin, 1, 1),
                (OffdiagCos, 1, -1),
                (OffdiagCos, 2, 0),
                (OffdiagSin, 2, 0),
                (OffdiagCos, 2, -1),
                (OffdiagCos, 2, 1),
                (OffdiagSin, 2, -1),
                (OffdiagSin, 2, 1),
            ]
        );
        for (k, m) in b.iter().enumerate() {
            assert_eq!(m.k, k);
            assert_eq!(m.eigenvalue, m.torus_mode().eigenvalue());
        }
    }

    #[test]
    fn distinct_eigenvalues_start_with_sums_of_two_squares() {
        let b = enumerate_basis(&BasisSpec::new(12.0, 40).unwrap());
        let unit = (PI / 6.0).powi(2);
        let mut distinct: Vec<f64> = Vec::new();
        for m in &b {
            if distinct.last().map_or(true, |&l| m.eigenvalue > l) {
                distinct.push(m.eigenvalue);
            }
        }
        let expected = [0.0, 1.0, 2.0, 4.0, 5.0, 8.0, 9.0, 10.0];
        for (got, want) in distinct.iter().zip(expected) {
            assert!((got - want * unit).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn symmetric_eigenspace_dimensions() {
        // dim of R(E_norm) = (lattice points + swap-fixed points) / 2.
        let b = enumerate_basis(&BasisSpec::new(12.0, 3000).unwrap());
        let last_norm = b.last().map(|m| (m.c1 * m.c1 + m.c2 * m.c2) as i64).unwrap();
        for norm in 0..last_norm {
            let r = (norm as f64).sqrt().ceil() as i64 + 1;
            let (mut points, mut fixed) = (0, 0);
            for a in -r..=r {
                for c in -r..=r {
                    if a * a + c * c == norm {
                        points += 1;
                        if a == c {
                            fixed += 1;
                        }
                    }
                }
            }
            let count = b
                .iter()
                .filter(|m| (m.c1 * m.c1 + m.c2 * m.c2) as i64 == norm)
                .count();
            assert_eq!(count, (points + fixed) / 2, "norm {norm}");
        }
    }

    #[test]
    fn evaluation_symmetry_and_periodicity() {
        let b = enumerate_basis(&BasisSpec::new(12.0, 200).unwrap());
        let pts = [(0.3, 4.1), (7.7, 2.0), (11.9, 0.05), (5.5, 5.5)];
        for m in &b {
            for &(x, y) in &pts {
                let v = evaluate_mode(m, x, y);
                assert_eq!(v, evaluate_mode(m, y, x));
                assert!((v - evaluate_mode(m, x + 12.0, y)).abs() < 1e-12);
                assert!((v - evaluate_mode(m, x, y - 24.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_samples_match_pointwise_evaluation() {
        let spec = BasisSpec::new(12.0, 150).unwrap();
        let sb = SampledBasis::new(spec, 48).unwrap();
        for (k, m) in sb.modes().iter().enumerate() {
            let s = sb.mode_samples(k);
            for &(i, j) in &[(0usize, 0usize), (3, 17), (47, 1), (20, 20)] {
                let x = 12.0 * i as f64 / 48.0;
                let y = 12.0 * j as f64 / 48.0;
                assert!((s[i * 48 + j] - m.evaluate(x, y)).abs() < 1e-12);
            }
            assert!(sb.mode_field(k).unwrap().is_swap_symmetric());
        }
        assert!(sb.mode_field(150).is_err());
    }

    #[test]
    fn spectrum_inclusion() {
        let mut b = enumerate_basis(&BasisSpec::new(12.0, 100).unwrap());
        assert!(spectrum_inclusion_check(&b, 12.0));
        assert!(spectrum_inclusion_check(&[], 12.0));
        b[37].eigenvalue += 1e-3;
        assert!(!spectrum_inclusion_check(&b, 12.0));
        // 3 is not a sum of two squares.
        let mut m = b[1];
        m.eigenvalue = torus_eigenvalue(1, 0, 12.0) * 3.0;
        assert!(!spectrum_inclusion_check(&[m], 12.0));
    }

    #[test]
    fn symmetrize_examples() {
        let f = GridField::from_fn(12.0, 8, |x, _| x).unwrap();
        let rf = symmetrize(&f);
        let expected = GridField::from_fn(12.0, 8, |x, y| 0.5 * (x + y)).unwrap();
        assert_eq!(rf.max_abs_diff(&expected).unwrap(), 0.0);
        assert_eq!(symmetrize(&rf), rf);
        let sym = GridField::from_fn(12.0, 8, |x, y| x * y + 1.0).unwrap();
        assert_eq!(symmetrize(&sym), sym);
    }

    #[test]
    fn nyquist_refusal() {
        let spec = BasisSpec::new(12.0, 30).unwrap();
        let modes = enumerate_basis(&spec);
        let max = modes.iter().map(|m| m.max_frequency()).max().unwrap();
        assert!(check_resolvable(&modes, 2 * max as usize + 1).is_ok());
        assert!(matches!(
            SampledBasis::new(spec, 2 * max as usize),
            Err(Error::Nyquist { .. })
        ));
        assert!(resolvable_prefix(&modes, 2 * max as usize) < modes.len());
        assert!(BasisSpec::new(12.0, 0).is_err());
    }
}
