//! Generalised basic hypergeometric series
//!
//! ```text
//! r_phi_s(a; b; q, x) = sum_n (a_1..a_r; q)_n / ((b_1..b_s; q)_n (q;q)_n)
//!                       * ((-1)^n q^{n(n-1)/2})^{1+s-r} x^n
//! ```
//!
//! Radius of convergence is infinite, 1 or 0 for `r-s < 1`, `= 1`, `> 1`.

use num_complex::Complex64;

use super::modulus::QModulus;
use super::spiral::DEFAULT_DELTA;
use super::summation::{sum_terms, Summed};
use super::truncation::Truncation;
use crate::error::{QError, Result};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Relative tolerance for deciding that an upper parameter is exactly `q^{-m}`.
const TERMINATION_TOL: f64 = 1e-12;

pub fn rphis(
    upper: &[Complex64],
    lower: &[Complex64],
    q: QModulus,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Complex64> {
    rphis_detailed(upper, lower, q, x, trunc).map(|s| s.value)
}

/// Smallest `m >= 0` with `a q^m` within `tol` of 1, if any.
fn hits_inverse_power(a: Complex64, q: QModulus, tol: f64) -> Option<i64> {
    if a.norm() == 0.0 {
        return None;
    }
    let m = ((1.0 / a.norm()).ln() / q.value().norm().ln()).round() as i64;
    (m.saturating_sub(1)..=m.saturating_add(1))
        .filter(|&k| k >= 0)
        .find(|&k| (ONE - a * q.pow(k)).norm() <= tol)
}

pub fn rphis_detailed(
    upper: &[Complex64],
    lower: &[Complex64],
    q: QModulus,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Summed> {
    // index of the last nonzero term for terminating series
    let last = upper
        .iter()
        .filter_map(|&a| hits_inverse_power(a, q, TERMINATION_TOL))
        .min();

    for (index, &b) in lower.iter().enumerate() {
        if let Some(m) = hits_inverse_power(b, q, DEFAULT_DELTA) {
            // (1 - b q^m) enters from term m+1 on
            if last.is_none_or(|l| m < l) {
                return Err(QError::BadLowerParameter { index, power: m });
            }
        }
    }

    let excess = upper.len() as i64 - lower.len() as i64;
    if last.is_none() {
        if excess > 1 && x.norm() > 0.0 {
            return Err(QError::DivergentSeries);
        }
        if excess == 1 && x.norm() >= 1.0 {
            return Err(QError::OutsideRadius { modulus: x.norm() });
        }
    }
    if x.norm() == 0.0 {
        return Ok(Summed::exact(ONE));
    }

    let power = 1 - excess;
    let qv = q.value();
    let mut term = ONE;
    let mut qn = ONE; // q^n
    let mut n: i64 = 0;
    let stop = last.unwrap_or(i64::MAX);
    let terms = std::iter::from_fn(|| {
        if n > stop {
            return None;
        }
        let current = term;
        let mut ratio = x;
        for &a in upper {
            ratio *= ONE - a * qn;
        }
        for &b in lower {
            ratio /= ONE - b * qn;
        }
        ratio /= ONE - qn * qv;
        let sign_weight = -qn;
        ratio *= sign_weight.powi(power as i32);
        term *= ratio;
        qn *= qv;
        n += 1;
        Some(current)
    });
    sum_terms(trunc, terms)
}
