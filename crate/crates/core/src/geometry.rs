//! Fundamental domain of the dyad orbifold `C²_gamma = T²_gamma / S₂` and its
//! realisation as a Möbius strip.
//!
//! A dyad is an unordered pair of pitch classes. Reducing both pitches mod
//! `gamma` and sorting them lands in the triangle
//! `T_gamma = { 0 <= y <= x < gamma }`, which holds exactly one point per
//! orbit. After rescaling to `gamma = 1`, the map `phi` sends `T_1` onto the
//! parameter rectangle of the strip and `moebius_embed` places it in 3-space.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodicity::{Cents, OCTAVE_CENTS};

/// Canonical representative of a dyad: `0 <= y <= x < gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadPoint {
    pub x: f64,
    pub y: f64,
    pub gamma: f64,
}

fn reduce_mod(v: f64, gamma: f64) -> f64 {
    let r = v.rem_euclid(gamma);
    // rem_euclid rounds tiny negative inputs up to exactly gamma
    if r >= gamma {
        0.0
    } else {
        r
    }
}

/// Reduces `(x, y)` modulo `(gamma Z)²` and the coordinate swap.
pub fn canonicalize(x: f64, y: f64, gamma: f64) -> Result<DyadPoint> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain {
            value: gamma,
            expected: "period gamma > 0",
        });
    }
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::Domain {
            value: if x.is_finite() { y } else { x },
            expected: "finite pitch coordinates",
        });
    }
    let (a, b) = (reduce_mod(x, gamma), reduce_mod(y, gamma));
    let (x, y) = if a >= b { (a, b) } else { (b, a) };
    Ok(DyadPoint { x, y, gamma })
}

impl DyadPoint {
    /// The same dyad rescaled into the unit domain `T_1`.
    pub fn to_unit(&self) -> (f64, f64) {
        (self.x / self.gamma, self.y / self.gamma)
    }
}

/// Interval of a canonical dyad in cents, in `[0, 1200)`.
///
/// One period `gamma` is one octave, so at `gamma = 12` this is
/// `100 * (x - y)`.
pub fn interval_cents(p: &DyadPoint) -> Cents {
    Cents(OCTAVE_CENTS * (p.x - p.y) / p.gamma)
}

/// Parameters `(alpha, r)` of the Möbius strip.
///
/// The strip is `[0, pi] x [-1/2, 1/2]` glued along `(0, r) ~ (pi, -r)`.
/// [`StripCoords::new`] applies that gluing so `alpha` always lies in
/// `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripCoords {
    pub alpha: f64,
    pub r: f64,
}

impl StripCoords {
    pub fn new(alpha: f64, r: f64) -> Result<Self> {
        if !(-0.5..=0.5).contains(&r) {
            return Err(Error::Domain {
                value: r,
                expected: "strip width coordinate r in [-1/2, 1/2]",
            });
        }
        if !(0.0..=PI).contains(&alpha) {
            return Err(Error::Domain {
                value: alpha,
                expected: "strip angle alpha in [0, pi]",
            });
        }
        if alpha == PI {
            return Ok(Self { alpha: 0.0, r: -r });
        }
        Ok(Self { alpha, r })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint3D(pub [f64; 3]);

impl EmbeddedPoint3D {
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Piecewise map from the unit fundamental domain `T_1` to strip parameters.
///
/// Points with `x + y >= 1` take the second branch.
pub fn phi(x: f64, y: f64) -> Result<StripCoords> {
    if !(0.0 <= y && y <= x && x < 1.0) {
        return Err(Error::Domain {
            value: x,
            expected: "point of T_1 = { 0 <= y <= x < 1 }",
        });
    }
    let s = x + y;
    if s < 1.0 {
        StripCoords::new(PI * s, x - y - 0.5)
    } else {
        StripCoords::new(PI * (s - 1.0), y - x + 0.5)
    }
}

/// Inverse of [`phi`]: the point of `T_1` that lands on `s`.
///
/// Along the line `r = alpha / pi - 1/2` the two branches meet; there the
/// first branch (`y = 0`) is returned.
pub fn phi_inverse(s: StripCoords) -> (f64, f64) {
    // Slack for the rounding in alpha = pi * (x + y).
    const SEAM_EPS: f64 = 1e-12;
    let sigma = s.alpha / PI;
    let t = s.r + 0.5;
    if t <= sigma + SEAM_EPS {
        ((sigma + t) / 2.0, ((sigma - t) / 2.0).max(0.0))
    } else {
        let t = 0.5 - s.r;
        ((sigma + 1.0 + t) / 2.0, (sigma + 1.0 - t) / 2.0)
    }
}

/// Embedding of the strip in 3-space.
pub fn moebius_embed(s: StripCoords) -> EmbeddedPoint3D {
    let (alpha, r) = (s.alpha, s.r);
    let radial = 1.0 + r * alpha.cos();
    let (sin2, cos2) = (2.0 * alpha).sin_cos();
    EmbeddedPoint3D([cos2 * radial, sin2 * radial, r * alpha.sin()])
}

/// Raw embedding formula with no gluing applied; valid for all real inputs.
pub fn moebius_embed_raw(alpha: f64, r: f64) -> EmbeddedPoint3D {
    moebius_embed(StripCoords { alpha, r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12
    }

    #[test]
    fn canonicalize_examples() {
        let p = canonicalize(3.0, 10.0, 12.0).unwrap();
        assert_eq!((p.x, p.y), (10.0, 3.0));
        let p = canonicalize(14.0, -1.0, 12.0).unwrap();
        assert_eq!((p.x, p.y), (11.0, 2.0));
        let q = canonicalize(p.x, p.y, 12.0).unwrap();
        assert_eq!(p, q);
        let p = canonicalize(-1e-18, 0.0, 12.0).unwrap();
        assert!(p.x < 12.0 && p.y >= 0.0);
        assert!(canonicalize(1.0, 2.0, 0.0).is_err());
        assert!(canonicalize(f64::NAN, 2.0, 12.0).is_err());
    }

    #[test]
    fn interval_examples() {
        let c = |x, y| interval_cents(&canonicalize(x, y, 12.0).unwrap()).0;
        assert_eq!(c(0.0, 0.0), 0.0);
        assert_eq!(c(7.0, 0.0), 700.0);
        assert_eq!(c(11.0, 2.0), 900.0);
        let unit = interval_cents(&canonicalize(0.5, 0.25, 1.0).unwrap()).0;
        assert_eq!(unit, 300.0);
    }

    #[test]
    fn phi_examples() {
        let s = phi(0.0, 0.0).unwrap();
        assert_eq!((s.alpha, s.r), (0.0, -0.5));
        let s = phi(0.5, 0.5).unwrap();
        assert_eq!((s.alpha, s.r), (0.0, 0.5));
        let s = phi(0.75, 0.0).unwrap();
        assert!(close((s.alpha, s.r), (0.75 * PI, 0.25)));
        assert!(phi(0.2, 0.3).is_err());
        assert!(phi(1.0, 0.0).is_err());
        assert!(phi(0.5, -0.1).is_err());
    }

    #[test]
    fn phi_inverse_round_trip() {
        let m = 40;
        for i in 0..m {
            for j in 0..=i {
                let (x, y) = (i as f64 / m as f64, j as f64 / m as f64);
                let back = phi_inverse(phi(x, y).unwrap());
                // Second-branch points with y = 0 cannot occur; x = 0 edge
                // points round-trip through the first branch.
                assert!(close(back, (x, y)), "({x}, {y}) -> {back:?}");
            }
        }
    }

    #[test]
    fn embed_examples() {
        let e = |a, r| moebius_embed(StripCoords::new(a, r).unwrap()).0;
        assert_eq!(e(0.0, -0.5), [0.5, 0.0, 0.0]);
        assert_eq!(e(0.0, 0.0), [1.0, 0.0, 0.0]);
        let p = e(PI / 2.0, 0.0);
        assert!((p[0] + 1.0).abs() < 1e-15 && p[1].abs() < 1e-15 && p[2] == 0.0);
    }

    #[test]
    fn strip_gluing_is_exact() {
        for k in 0..=20 {
            let r = -0.5 + k as f64 / 20.0;
            let glued = moebius_embed(StripCoords::new(PI, r).unwrap());
            let start = moebius_embed(StripCoords::new(0.0, -r).unwrap());
            assert_eq!(glued, start);
            // The raw formula agrees up to rounding of sin(2 pi).
            assert!(moebius_embed_raw(PI, r).distance(&start) < 1e-15);
        }
        assert!(StripCoords::new(0.1, 0.6).is_err());
        assert!(StripCoords::new(-0.1, 0.0).is_err());
    }
}
