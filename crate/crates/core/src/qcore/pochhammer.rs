use num_complex::Complex64;

use super::modulus::QModulus;
use super::spiral::{Spiral, DEFAULT_DELTA};
use super::truncation::Truncation;
use crate::error::{QError, Result};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Finite q-shifted factorial `(a;q)_n = prod_{j<n} (1 - a q^j)`.
pub fn qpochhammer_n(a: Complex64, q: QModulus, n: usize) -> Complex64 {
    let mut p = ONE;
    let mut aq = a;
    for _ in 0..n {
        p *= ONE - aq;
        aq *= q.value();
    }
    p
}

/// `(a;q)_inf`, multiplying factors until `streak` consecutive `|a q^n| < eps`.
pub fn qpochhammer_inf(a: Complex64, q: QModulus, trunc: &Truncation) -> Result<Complex64> {
    qpochhammer_inf_counted(a, q, trunc).map(|(v, _)| v)
}

pub(crate) fn qpochhammer_inf_counted(
    a: Complex64,
    q: QModulus,
    trunc: &Truncation,
) -> Result<(Complex64, usize)> {
    let mut p = ONE;
    let mut aq = a;
    let mut small = 0usize;
    for n in 0..trunc.n_max {
        if aq.norm() < trunc.eps {
            small += 1;
            if small >= trunc.streak {
                return Ok((p, n));
            }
        } else {
            small = 0;
        }
        p *= ONE - aq;
        aq *= q.value();
    }
    Err(QError::TruncationExceeded { n_max: trunc.n_max })
}

/// `(a_1, ..., a_m; q)_inf`.
pub fn qpochhammer_inf_multi(
    args: &[Complex64],
    q: QModulus,
    trunc: &Truncation,
) -> Result<Complex64> {
    args.iter()
        .try_fold(ONE, |acc, &a| Ok(acc * qpochhammer_inf(a, q, trunc)?))
}

/// `1/(lambda q^{-k}; q)_inf` through the closed form
/// `(-lambda)^{-k} q^{k(k+1)/2} / ((lambda;q)_inf (q/lambda;q)_k)`.
///
/// Requires `lambda` off `q^Z`.
pub fn qpochhammer_inf_shifted_pole(
    lambda: Complex64,
    q: QModulus,
    k: usize,
    trunc: &Truncation,
) -> Result<Complex64> {
    Spiral::new(ONE, q, DEFAULT_DELTA)?.ensure_clear(lambda)?;
    let k_i = k as i64;
    let lead = (-lambda).powi(-(k as i32)) * q.pow(k_i * (k_i + 1) / 2);
    let denom = qpochhammer_inf(lambda, q, trunc)? * qpochhammer_n(q.value() / lambda, q, k);
    Ok(lead / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn finite_products() {
        let q = QModulus::real(0.5).unwrap();
        assert_eq!(qpochhammer_n(c(3.7, -1.0), q, 0), ONE);
        assert_eq!(qpochhammer_n(c(2.0, 0.0), q, 2), c(0.0, 0.0));
        // 0.5 * 0.75 * 0.875
        assert!((qpochhammer_n(c(0.5, 0.0), q, 3) - c(0.328125, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn infinite_product_trivial_arguments() {
        let q = QModulus::real(0.3).unwrap();
        let t = Truncation::default();
        assert_eq!(qpochhammer_inf(c(0.0, 0.0), q, &t).unwrap(), ONE);
        assert_eq!(qpochhammer_inf(c(1.0, 0.0), q, &t).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn infinite_product_matches_long_direct_product() {
        let q = QModulus::real(0.5).unwrap();
        let direct = qpochhammer_n(c(0.5, 0.0), q, 200);
        let v = qpochhammer_inf(c(0.5, 0.0), q, &Truncation::default()).unwrap();
        assert!((v - direct).norm() < 1e-15);
    }

    #[test]
    fn multi_argument_fold() {
        let q = QModulus::real(0.5).unwrap();
        let t = Truncation::default();
        let a = [c(0.2, 0.1), c(-0.4, 0.0)];
        let m = qpochhammer_inf_multi(&a, q, &t).unwrap();
        let p = qpochhammer_inf(a[0], q, &t).unwrap() * qpochhammer_inf(a[1], q, &t).unwrap();
        assert!((m - p).norm() < 1e-15);
    }

    #[test]
    fn shifted_pole_rejects_integer_powers() {
        let q = QModulus::real(0.5).unwrap();
        let t = Truncation::default();
        assert!(matches!(
            qpochhammer_inf_shifted_pole(c(0.25, 0.0), q, 2, &t),
            Err(QError::SpiralProximity { .. })
        ));
    }

    #[test]
    fn shifted_pole_k_zero_is_reciprocal() {
        let q = QModulus::real(0.5).unwrap();
        let t = Truncation::default();
        let v = qpochhammer_inf_shifted_pole(c(0.3, 0.0), q, 0, &t).unwrap();
        let r = 1.0 / qpochhammer_inf(c(0.3, 0.0), q, &t).unwrap();
        assert!((v - r).norm() < 1e-15 * r.norm());
    }

    #[test]
    fn shifted_pole_agrees_with_direct_product() {
        // the defining product still converges for lambda q^-k, it just has large early factors
        let q = QModulus::real(0.5).unwrap();
        let t = Truncation::default();
        for lambda in [c(0.3, 0.0), Complex64::from_polar(2.0, 0.7)] {
            for k in 0..=8usize {
                let closed = qpochhammer_inf_shifted_pole(lambda, q, k, &t).unwrap();
                let start = lambda * q.pow(-(k as i64));
                let direct = 1.0 / qpochhammer_n(start, q, 400);
                let rel = (closed - direct).norm() / direct.norm();
                assert!(rel < 1e-12, "lambda={lambda} k={k} rel={rel}");
            }
        }
    }
}
