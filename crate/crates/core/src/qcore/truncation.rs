use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};

/// Tail-tolerance policy for every infinite sum and product.
///
/// A sum stops once `streak` consecutive terms satisfy `|term| <= eps * |partial|`;
/// a product `(a;q)_inf` stops once `streak` consecutive `|a q^n| < eps`.
/// Reaching `n_max` terms first is an error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub eps: f64,
    pub n_max: usize,
    #[serde(skip, default = "default_streak")]
    pub streak: usize,
}

fn default_streak() -> usize {
    Truncation::DEFAULT.streak
}

impl Truncation {
    pub const DEFAULT: Truncation = Truncation {
        eps: 1e-15,
        n_max: 10_000,
        streak: 3,
    };

    pub fn new(eps: f64, n_max: usize, streak: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(QError::InvalidTruncation(format!(
                "eps must be > 0, got {eps}"
            )));
        }
        if n_max == 0 {
            return Err(QError::InvalidTruncation("n_max must be >= 1".into()));
        }
        if streak == 0 {
            return Err(QError::InvalidTruncation("streak must be >= 1".into()));
        }
        Ok(Self { eps, n_max, streak })
    }

    pub fn with_eps(self, eps: f64) -> Result<Self> {
        Self::new(eps, self.n_max, self.streak)
    }

    /// Same policy with at least `streak` consecutive small terms required.
    pub fn with_min_streak(self, streak: usize) -> Self {
        Self {
            streak: self.streak.max(streak),
            ..self
        }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Truncation::new(0.0, 10, 1).is_err());
        assert!(Truncation::new(1e-12, 0, 1).is_err());
        assert!(Truncation::new(1e-12, 10, 0).is_err());
        assert!(Truncation::new(f64::INFINITY, 10, 1).is_err());
        let t = Truncation::new(1e-12, 10, 2).unwrap();
        assert_eq!(t.with_min_streak(5).streak, 5);
        assert_eq!(t.with_min_streak(1).streak, 2);
    }
}
