use std::fmt;

use num_complex::Complex64;

use crate::error::{QError, Result};

/// The base `q` of all q-series, restricted to the punctured unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QModulus {
    q: Complex64,
}

impl QModulus {
    pub fn new(q: Complex64) -> Result<Self> {
        let r = q.norm();
        if !(r > 0.0 && r < 1.0) || !q.is_finite() {
            return Err(QError::InvalidModulus(q));
        }
        Ok(Self { q })
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(Complex64::new(q, 0.0))
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.q
    }

    /// Base `q^2`.
    pub fn squared(&self) -> Self {
        Self { q: self.q * self.q }
    }

    /// Base `p = sqrt(q)`, principal branch.
    pub fn sqrt(&self) -> Self {
        Self { q: self.q.sqrt() }
    }

    /// Principal logarithm of q.
    pub fn ln(&self) -> Complex64 {
        self.q.ln()
    }

    /// `q^n` for any integer n.
    pub fn pow(&self, n: i64) -> Complex64 {
        int_pow(self.q, n)
    }

    /// `q^{n(n-1)/2}`, the Gaussian weight of theta series and q-Borel transforms.
    pub fn tri(&self, n: i64) -> Complex64 {
        int_pow(self.q, n * (n - 1) / 2)
    }
}

impl fmt::Display for QModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)
    }
}

/// Integer power by repeated squaring, falling back to `exp(n ln z)` outside i32 range.
pub(crate) fn int_pow(z: Complex64, n: i64) -> Complex64 {
    match i32::try_from(n) {
        Ok(k) => z.powi(k),
        Err(_) => (z.ln() * n as f64).exp(),
    }
}
