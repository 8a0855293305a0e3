use std::fmt;

use num_complex::Complex64;

use super::modulus::{int_pow, QModulus};
use crate::error::{QError, Result};

/// Relative distance below which a point counts as lying on a spiral.
pub const DEFAULT_DELTA: f64 = 1e-6;

/// The discrete q-spiral `[lambda; q] = { lambda q^k : k in Z }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spiral {
    lambda: Complex64,
    base: QModulus,
    delta: f64,
}

/// Closest spiral point to a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub index: i64,
    pub point: Complex64,
    /// `|x - lambda q^k| / |lambda q^k|`
    pub distance: f64,
}

impl Spiral {
    pub fn new(lambda: Complex64, base: QModulus, delta: f64) -> Result<Self> {
        if lambda == Complex64::new(0.0, 0.0) || !lambda.is_finite() {
            return Err(QError::InvalidParameter(
                "spiral anchor must be nonzero".into(),
            ));
        }
        if delta.is_nan() || delta <= 0.0 {
            return Err(QError::InvalidParameter(
                "spiral tolerance must be positive".into(),
            ));
        }
        Ok(Self {
            lambda,
            base,
            delta,
        })
    }

    /// Spiral with the default proximity tolerance.
    pub fn with_default_delta(lambda: Complex64, base: QModulus) -> Result<Self> {
        Self::new(lambda, base, DEFAULT_DELTA)
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn base(&self) -> QModulus {
        self.base
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn point(&self, k: i64) -> Complex64 {
        self.lambda * int_pow(self.base.value(), k)
    }

    /// Nearest spiral point over all integer indices, or over `range` when given.
    pub fn nearest_in(&self, x: Complex64, range: Option<(i64, i64)>) -> Option<Nearest> {
        if x.norm() == 0.0 || !x.is_finite() {
            return None;
        }
        let ratio = (x / self.lambda).norm().ln() / self.base.value().norm().ln();
        let guess = ratio.round() as i64;
        let (lo, hi) = range.unwrap_or((i64::MIN, i64::MAX));
        let centre = guess.clamp(lo, hi);
        let mut best: Option<Nearest> = None;
        for k in [centre.saturating_sub(1), centre, centre.saturating_add(1)] {
            if k < lo || k > hi {
                continue;
            }
            let p = self.point(k);
            let distance = (x - p).norm() / p.norm();
            if best.is_none_or(|b| distance < b.distance) {
                best = Some(Nearest {
                    index: k,
                    point: p,
                    distance,
                });
            }
        }
        best
    }

    pub fn nearest(&self, x: Complex64) -> Option<Nearest> {
        self.nearest_in(x, None)
    }

    pub fn contains(&self, x: Complex64) -> bool {
        self.nearest(x).is_some_and(|n| n.distance <= self.delta)
    }

    /// `Err(SpiralProximity)` if `x` is within tolerance of the spiral.
    pub fn ensure_clear(&self, x: Complex64) -> Result<()> {
        self.ensure_clear_in(x, None)
    }

    pub fn ensure_clear_in(&self, x: Complex64, range: Option<(i64, i64)>) -> Result<()> {
        match self.nearest_in(x, range) {
            Some(n) if n.distance <= self.delta => Err(QError::SpiralProximity {
                point: x,
                spiral: self.to_string(),
                index: n.index,
                distance: n.distance,
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Spiral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}]", self.lambda, self.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn finds_both_signs_of_index() {
        let q = QModulus::real(0.5).unwrap();
        let s = Spiral::with_default_delta(c(0.7, 0.0), q).unwrap();
        assert!(s.contains(c(0.7 * 8.0, 0.0)));
        assert!(s.contains(c(0.7 / 16.0, 0.0)));
        assert_eq!(s.nearest(c(5.6, 0.0)).unwrap().index, -3);
        assert_eq!(s.nearest(c(0.7 / 16.0, 0.0)).unwrap().index, 4);
        assert!(!s.contains(c(-0.7, 0.0)));
        assert!(!s.contains(c(1.0, 0.0)));
    }

    #[test]
    fn range_restriction() {
        let q = QModulus::real(0.5).unwrap();
        let s = Spiral::with_default_delta(c(1.0, 0.0), q).unwrap();
        // 4 = q^-2 is excluded when only k >= 0 is considered
        assert!(s.ensure_clear_in(c(4.0, 0.0), Some((0, i64::MAX))).is_ok());
        assert!(s.ensure_clear_in(c(4.0, 0.0), Some((i64::MIN, 0))).is_err());
    }

    #[test]
    fn complex_base() {
        let q = QModulus::new(Complex64::from_polar(0.6, 0.9)).unwrap();
        let s = Spiral::with_default_delta(c(1.3, -0.2), q).unwrap();
        for k in -6..=6 {
            let n = s.nearest(s.point(k) * (1.0 + 1e-9)).unwrap();
            assert_eq!(n.index, k);
            assert!(n.distance < 1e-8);
        }
    }
}
