use num_complex::Complex64;

use super::hypergeometric::rphis_detailed;
use super::modulus::QModulus;
use super::pochhammer::qpochhammer_inf;
use super::spiral::{Spiral, DEFAULT_DELTA};
use super::summation::Summed;
use super::truncation::Truncation;
use crate::error::{QError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `e_q(x) = 1phi0(0; -; q, x) = sum x^n / (q;q)_n`, series form, `|x| < 1`.
pub fn e_exp(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Complex64> {
    e_exp_detailed(q, x, trunc).map(|s| s.value)
}

pub fn e_exp_detailed(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Summed> {
    rphis_detailed(&[ZERO], &[], q, x, trunc)
}

/// `e_q(x) = 1/(x;q)_inf`, valid off the poles `x = q^{-k}`, `k >= 0`.
pub fn e_exp_product(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Complex64> {
    let poles = Spiral::new(ONE, q, DEFAULT_DELTA)?;
    if let Some(n) = poles.nearest_in(x, Some((i64::MIN, 0))) {
        if n.distance <= poles.delta() {
            return Err(QError::PoleHit {
                point: x,
                pole: n.point,
            });
        }
    }
    Ok(1.0 / qpochhammer_inf(x, q, trunc)?)
}

/// `E_q(x) = 0phi0(-; -; q, -x) = sum q^{n(n-1)/2} x^n / (q;q)_n`, entire.
pub fn big_e_exp(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Complex64> {
    big_e_exp_detailed(q, x, trunc).map(|s| s.value)
}

pub fn big_e_exp_detailed(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Summed> {
    rphis_detailed(&[], &[], q, -x, trunc)
}

/// `E_q(x) = (-x;q)_inf`.
pub fn big_e_exp_product(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Complex64> {
    qpochhammer_inf(-x, q, trunc)
}
