//! Truncated sums with the shared tail criterion.

use num_complex::Complex64;

use super::truncation::Truncation;
use crate::error::{QError, Result};

/// A truncated sum together with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summed {
    pub value: Complex64,
    /// Number of terms (or factors) actually used.
    pub terms: usize,
    /// Sum of the absolute values of the terms.
    pub abs_sum: f64,
}

impl Summed {
    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            terms: 1,
            abs_sum: value.norm(),
        }
    }

    /// Multiplies by an exactly known factor.
    pub fn scaled(self, c: Complex64) -> Self {
        Self {
            value: self.value * c,
            terms: self.terms,
            abs_sum: self.abs_sum * c.norm(),
        }
    }

    /// Sum of two sums: magnitudes add, so cancellation between them shows up too.
    pub fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            terms: self.terms + other.terms,
            abs_sum: self.abs_sum + other.abs_sum,
        }
    }

    /// `sum |term| / |sum|`; 1 when there is no cancellation.
    pub fn condition(&self) -> f64 {
        if self.abs_sum == 0.0 {
            1.0
        } else {
            self.abs_sum / self.value.norm().max(1e-300)
        }
    }
}

/// Sums `terms` until the tail criterion holds or the iterator ends (terminating series).
pub(crate) fn sum_terms<I>(trunc: &Truncation, terms: I) -> Result<Summed>
where
    I: IntoIterator<Item = Complex64>,
{
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut small = 0usize;
    let mut count = 0usize;
    for term in terms {
        if count >= trunc.n_max {
            return Err(QError::TruncationExceeded { n_max: trunc.n_max });
        }
        value += term;
        abs_sum += term.norm();
        count += 1;
        if term.norm() <= trunc.eps * value.norm() {
            small += 1;
            if small >= trunc.streak {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(Summed {
        value,
        terms: count,
        abs_sum,
    })
}

/// Bilateral sum over `n in Z`, extending both tails symmetrically until each has
/// `trunc.streak` consecutive negligible terms.
pub(crate) fn sum_bilateral<F>(trunc: &Truncation, mut term: F) -> Result<Summed>
where
    F: FnMut(i64) -> Result<Complex64>,
{
    let first = term(0)?;
    let mut value = first;
    let mut abs_sum = first.norm();
    let mut count = 1usize;
    let (mut up_small, mut down_small) = (0usize, 0usize);
    let (mut up_done, mut down_done) = (false, false);
    let mut k = 1i64;
    while !(up_done && down_done) {
        if count >= trunc.n_max {
            return Err(QError::TruncationExceeded { n_max: trunc.n_max });
        }
        for (n, small, done) in [
            (k, &mut up_small, &mut up_done),
            (-k, &mut down_small, &mut down_done),
        ] {
            if *done {
                continue;
            }
            let t = term(n)?;
            value += t;
            abs_sum += t.norm();
            count += 1;
            if t.norm() <= trunc.eps * value.norm() {
                *small += 1;
                *done = *small >= trunc.streak;
            } else {
                *small = 0;
            }
        }
        k += 1;
    }
    Ok(Summed {
        value,
        terms: count,
        abs_sum,
    })
}
