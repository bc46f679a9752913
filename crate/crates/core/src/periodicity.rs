//! Logarithmic periodicity of intervals.
//!
//! The periodicity of a frequency ratio `a/b` (reduced) is its denominator
//! `b`, the number of periods of the lower tone after which the combined
//! waveform repeats. We work with `log2(b)` and make it tolerant to pitch
//! deviations of up to one just noticeable difference (JND) by taking the
//! simplest ratio inside the tolerance window. "Simplest" means minimal
//! denominator, found exactly by descending the Stern-Brocot tree.

use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GridField;
use crate::geometry::{canonicalize, interval_cents};

/// Reference frequency of C4 in Hz; pitch 0 in the semitone convention.
pub const REFERENCE_F0_HZ: f64 = 261.626;

/// Cents per octave.
pub const OCTAVE_CENTS: f64 = 1200.0;

/// Default pitch JND in cents.
pub const DEFAULT_JND_CENTS: f64 = 20.0;

/// Default bound on denominators visited by the rational search.
pub const DEFAULT_DENOMINATOR_GUARD: u64 = 1_000_000;

/// A reduced frequency ratio `a/b` with `a >= b >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalRatio {
    numer: u64,
    denom: u64,
}

impl RationalRatio {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer < denom {
            return Err(Error::InvalidParameter(format!(
                "ratio {numer}/{denom} must satisfy a >= b >= 1"
            )));
        }
        if gcd(numer, denom) != 1 {
            return Err(Error::InvalidParameter(format!(
                "ratio {numer}/{denom} is not reduced"
            )));
        }
        Ok(Self { numer, denom })
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn value(&self) -> f64 {
        ratio_value(self.numer, self.denom)
    }

    /// Size of the interval in cents.
    pub fn cents(&self) -> Cents {
        Cents(OCTAVE_CENTS * self.value().log2())
    }
}

impl fmt::Display for RationalRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// Logarithmic interval size, 1200 per octave.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Cents(pub f64);

impl Cents {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain {
                value,
                expected: "finite cents value",
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Interval between two frequencies, `1200 * log2(f2 / f1)`.
    pub fn between_frequencies(f1: f64, f2: f64) -> Self {
        Self(OCTAVE_CENTS * (f2 / f1).log2())
    }

    /// Frequency ratio `2^(d / 1200)`.
    pub fn to_ratio(self) -> f64 {
        (self.0 / OCTAVE_CENTS).exp2()
    }
}

/// Pitch in semitones relative to `f0`: `12 * log2(f / f0)`.
pub fn semitones_from_frequency(freq: f64, f0: f64) -> f64 {
    12.0 * (freq / f0).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityConfig {
    pub jnd_cents: f64,
    pub max_denominator_guard: u64,
}

impl Default for PeriodicityConfig {
    fn default() -> Self {
        Self {
            jnd_cents: DEFAULT_JND_CENTS,
            max_denominator_guard: DEFAULT_DENOMINATOR_GUARD,
        }
    }
}

impl PeriodicityConfig {
    pub fn new(jnd_cents: f64) -> Result<Self> {
        Self {
            jnd_cents,
            ..Self::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.jnd_cents > 0.0 && self.jnd_cents.is_finite()) {
            return Err(Error::Domain {
                value: self.jnd_cents,
                expected: "JND > 0 cents",
            });
        }
        if self.max_denominator_guard == 0 {
            return Err(Error::InvalidParameter(
                "max_denominator_guard must be positive".into(),
            ));
        }
        Ok(self)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The value of `numer / denom` as used by every interval membership test.
#[inline]
pub fn ratio_value(numer: u64, denom: u64) -> f64 {
    numer as f64 / denom as f64
}

/// Finds the rational with the smallest denominator in `[lo, hi]`.
///
/// Ratios below unison are outside the domain of [`RationalRatio`], so `lo`
/// is raised to 1 when the interval straddles it; the interval must reach
/// at least 1. Among fractions sharing the minimal denominator the smallest
/// numerator wins, though the Stern-Brocot descent can only ever meet one.
pub fn min_denominator_rational(lo: f64, hi: f64, guard: u64) -> Result<RationalRatio> {
    if !(lo > 0.0 && lo.is_finite()) {
        return Err(Error::Domain {
            value: lo,
            expected: "positive finite lower bound",
        });
    }
    if !hi.is_finite() {
        return Err(Error::Domain {
            value: hi,
            expected: "finite upper bound",
        });
    }
    if lo > hi {
        return Err(Error::EmptyInterval { lo, hi });
    }
    if hi < 1.0 {
        return Err(Error::BelowUnison { lo, hi });
    }
    let lo = lo.max(1.0);

    let below = |f: Frac| ratio_value(f.0, f.1) < lo;
    let above = |f: Frac| ratio_value(f.0, f.1) > hi;

    // Any fraction in [lo, hi] with denominator <= guard has numerator
    // <= hi * guard, and numerators and denominators only grow along a
    // descent path, so both caps bound every node we may visit.
    let numer_cap = (hi.ceil() as u64).saturating_add(1).saturating_mul(guard);

    let mut left: Frac = (0, 1);
    let mut right: Frac = (1, 0);
    loop {
        let mediant = (left.0 + right.0, left.1 + right.1);
        if mediant.1 > guard || mediant.0 > numer_cap {
            return Err(Error::GuardExceeded { guard });
        }
        if above(mediant) {
            // Run of left turns: mediants are right + j * left.
            let j = first_failing(right, left, guard, numer_cap, above)?;
            right = (right.0 + (j - 1) * left.0, right.1 + (j - 1) * left.1);
        } else if below(mediant) {
            // Run of right turns: mediants are left + j * right.
            let j = first_failing(left, right, guard, numer_cap, below)?;
            left = (left.0 + (j - 1) * right.0, left.1 + (j - 1) * right.1);
        } else {
            return RationalRatio::new(mediant.0, mediant.1);
        }
    }
}

type Frac = (u64, u64);

/// Smallest `j >= 1` such that `pred(base + j * step)` is false, where
/// `pred` holds at `j = 1` and is monotone along the run.
fn first_failing(
    base: Frac,
    step: Frac,
    guard: u64,
    numer_cap: u64,
    pred: impl Fn(Frac) -> bool,
) -> Result<u64> {
    let cap_for = |b: u64, s: u64, cap: u64| if s == 0 { u64::MAX } else { (cap - b) / s };
    let j_max = cap_for(base.0, step.0, numer_cap).min(cap_for(base.1, step.1, guard));
    let at = |j: u64| (base.0 + j * step.0, base.1 + j * step.1);
    if j_max < 1 || pred(at(j_max)) {
        return Err(Error::GuardExceeded { guard });
    }
    // pred(at(lo)) is true, pred(at(hi)) is false.
    let (mut lo, mut hi) = (1u64, j_max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Logarithmic periodicity `log2(b)` of a reduced ratio `a/b`.
pub fn periodicity_log(r: RationalRatio) -> f64 {
    (r.denom() as f64).log2()
}

/// Simplest ratio within one JND of the interval `d`.
pub fn simplest_ratio_within_jnd(d: Cents, cfg: &PeriodicityConfig) -> Result<RationalRatio> {
    if !(d.0 >= 0.0 && d.0.is_finite()) {
        return Err(Error::Domain {
            value: d.0,
            expected: "interval d >= 0 cents",
        });
    }
    let lo = Cents(d.0 - cfg.jnd_cents).to_ratio();
    let hi = Cents(d.0 + cfg.jnd_cents).to_ratio();
    min_denominator_rational(lo, hi, cfg.max_denominator_guard)
}

/// JND-tolerant logarithmic periodicity of an interval of `d >= 0` cents.
pub fn p_jnd(d: Cents, cfg: &PeriodicityConfig) -> Result<f64> {
    simplest_ratio_within_jnd(d, cfg).map(periodicity_log)
}

/// Inversion-symmetric periodicity, `min(P_JND(d), P_JND(1200 - d))`.
pub fn p_jnd_sym(d: Cents, cfg: &PeriodicityConfig) -> Result<f64> {
    if !(0.0..=OCTAVE_CENTS).contains(&d.0) {
        return Err(Error::Domain {
            value: d.0,
            expected: "interval within [0, 1200] cents",
        });
    }
    let direct = p_jnd(d, cfg)?;
    let inverted = p_jnd(Cents(OCTAVE_CENTS - d.0), cfg)?;
    Ok(direct.min(inverted))
}

/// Symmetrised periodicity pulled back to the dyad orbifold `C²_gamma`.
///
/// `gamma` is the octave length in the coordinate units of `(x, y)`; with
/// `gamma = 12` the coordinates are semitones.
pub fn p_plus_field(x: f64, y: f64, gamma: f64, cfg: &PeriodicityConfig) -> Result<f64> {
    let p = canonicalize(x, y, gamma)?;
    // x >= y inside the fundamental domain, so d lands in [0, 1200).
    let d = interval_cents(&p).0.clamp(0.0, OCTAVE_CENTS);
    p_jnd_sym(Cents(d), cfg)
}

/// Samples [`p_plus_field`] at every node of an `n x n` grid with period
/// `gamma`. The result is exactly swap-symmetric.
pub fn p_plus_grid(gamma: f64, n: usize, cfg: &PeriodicityConfig) -> Result<GridField> {
    let h = gamma / n as f64;
    let values = (0..n * n)
        .into_par_iter()
        .map(|p| p_plus_field(h * (p / n) as f64, h * (p % n) as f64, gamma, cfg))
        .collect::<Result<Vec<f64>>>()?;
    let samples =
        Array2::from_shape_vec((n, n), values).map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    GridField::new(gamma, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PeriodicityConfig {
        PeriodicityConfig::default()
    }

    fn cents_ratio(c: f64) -> f64 {
        Cents(c).to_ratio()
    }

    #[test]
    fn singleton_at_unison() {
        let r = min_denominator_rational(1.0, 1.0, 100).unwrap();
        assert_eq!((r.numer(), r.denom()), (1, 1));
    }

    #[test]
    fn fifth_and_tritone_windows() {
        let r = min_denominator_rational(cents_ratio(680.0), cents_ratio(720.0), 1000).unwrap();
        assert_eq!(r.to_string(), "3/2");
        let r = min_denominator_rational(cents_ratio(580.0), cents_ratio(620.0), 1000).unwrap();
        assert_eq!(r.to_string(), "7/5");
    }

    #[test]
    fn integer_and_wide_intervals() {
        assert_eq!(min_denominator_rational(2.0, 2.0, 10).unwrap().to_string(), "2/1");
        assert_eq!(min_denominator_rational(2.5, 7.9, 10).unwrap().to_string(), "3/1");
        assert_eq!(min_denominator_rational(1.4, 1.6, 10).unwrap().to_string(), "3/2");
        // Straddling unison clamps to 1/1.
        assert_eq!(min_denominator_rational(0.9, 1.05, 10).unwrap().to_string(), "1/1");
    }

    #[test]
    fn long_runs_near_unison() {
        let r = min_denominator_rational(1.0001, 1.0002, 1_000_000).unwrap();
        assert!(r.value() >= 1.0001 && r.value() <= 1.0002);
        assert!(r.denom() <= 5000, "{r}");
    }

    #[test]
    fn rational_search_errors() {
        assert!(matches!(
            min_denominator_rational(1.5, 1.2, 10),
            Err(Error::EmptyInterval { .. })
        ));
        assert!(matches!(
            min_denominator_rational(0.5, 0.9, 10),
            Err(Error::BelowUnison { .. })
        ));
        assert!(matches!(
            min_denominator_rational(1.0001, 1.0002, 100),
            Err(Error::GuardExceeded { guard: 100 })
        ));
        assert!(min_denominator_rational(0.0, 1.0, 10).is_err());
        assert!(min_denominator_rational(1.0, f64::NAN, 10).is_err());
    }

    #[test]
    fn ratio_invariants() {
        assert!(RationalRatio::new(4, 2).is_err());
        assert!(RationalRatio::new(2, 3).is_err());
        assert!(RationalRatio::new(1, 0).is_err());
        assert!(RationalRatio::new(5, 4).is_ok());
    }

    #[test]
    fn log_periodicity_values() {
        assert_eq!(periodicity_log(RationalRatio::new(1, 1).unwrap()), 0.0);
        assert_eq!(periodicity_log(RationalRatio::new(3, 2).unwrap()), 1.0);
        let p = periodicity_log(RationalRatio::new(7, 5).unwrap());
        // log2(5) = 2.321928094887362347870...
        assert!((p - 2.321_928_094_887_362_3).abs() < 1e-15);
    }

    #[test]
    fn p_jnd_examples() {
        assert_eq!(p_jnd(Cents(0.0), &cfg()).unwrap(), 0.0);
        assert_eq!(p_jnd(Cents(700.0), &cfg()).unwrap(), 1.0);
        assert_eq!(p_jnd(Cents(100.0), &cfg()).unwrap(), 14f64.log2());
        assert_eq!(p_jnd(Cents(1200.0), &cfg()).unwrap(), 0.0);
        assert!(p_jnd(Cents(-1.0), &cfg()).is_err());
    }

    #[test]
    fn p_jnd_sym_examples() {
        assert_eq!(p_jnd_sym(Cents(600.0), &cfg()).unwrap(), 5f64.log2());
        assert_eq!(p_jnd_sym(Cents(700.0), &cfg()).unwrap(), 1.0);
        assert_eq!(p_jnd_sym(Cents(500.0), &cfg()).unwrap(), 1.0);
        assert_eq!(p_jnd_sym(Cents(0.0), &cfg()).unwrap(), 0.0);
        assert!(p_jnd_sym(Cents(1200.5), &cfg()).is_err());
        assert!(p_jnd_sym(Cents(-0.5), &cfg()).is_err());
    }

    #[test]
    fn field_examples() {
        assert_eq!(p_plus_field(0.0, 0.0, 12.0, &cfg()).unwrap(), 0.0);
        assert_eq!(p_plus_field(7.0, 0.0, 12.0, &cfg()).unwrap(), 1.0);
        assert_eq!(p_plus_field(0.0, 7.0, 12.0, &cfg()).unwrap(), 1.0);
        assert_eq!(p_plus_field(19.0, -12.0, 12.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn grid_sampling_matches_pointwise() {
        let g = p_plus_grid(12.0, 24, &cfg()).unwrap();
        assert!(g.is_swap_symmetric());
        assert_eq!(g.get(14, 0), 1.0); // 7 semitones
        assert_eq!(g.get(0, 14), 1.0);
        assert_eq!(g.get(5, 5), 0.0);
        for (i, j) in [(3, 19), (23, 1), (12, 0)] {
            let x = 0.5 * i as f64;
            let y = 0.5 * j as f64;
            assert_eq!(g.get(i, j), p_plus_field(x, y, 12.0, &cfg()).unwrap());
        }
    }

    #[test]
    fn config_validation() {
        assert!(PeriodicityConfig::new(0.0).is_err());
        assert!(PeriodicityConfig::new(-3.0).is_err());
        assert!(PeriodicityConfig::new(f64::INFINITY).is_err());
        assert_eq!(PeriodicityConfig::new(20.0).unwrap(), cfg());
    }

    #[test]
    fn pitch_conventions() {
        assert_eq!(semitones_from_frequency(REFERENCE_F0_HZ, REFERENCE_F0_HZ), 0.0);
        let a4 = semitones_from_frequency(440.0, REFERENCE_F0_HZ);
        assert!((a4 - 9.0).abs() < 1e-4);
        let c = Cents::between_frequencies(200.0, 300.0);
        assert!((c.0 - 701.955_000_865_387_4).abs() < 1e-9);
        assert!((RationalRatio::new(3, 2).unwrap().cents().0 - c.0).abs() < 1e-12);
    }
}
