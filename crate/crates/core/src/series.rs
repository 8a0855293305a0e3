//! Truncated formal power series over a base `q` and the q-difference operators
//! `sum c x^m sigma_q^l` acting on them.
//!
//! Coefficient reweighting by `q^{-n(n-1)/2}` overflows quickly, so every series
//! keeps only its finite prefix: the first non-finite coefficient ends the valid
//! order, and magnitudes below `1e-300` are flushed to zero (recorded in
//! [`FormalSeries::flushed`]).

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::qcore::{qpochhammer_n, QModulus};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const FLUSH_BELOW: f64 = 1e-300;

/// Default truncation order for formal checks.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries {
    base: QModulus,
    coeffs: Vec<Complex64>,
    flushed: bool,
}

impl FormalSeries {
    pub fn new(base: QModulus, coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.first() {
            Some(c) if c.is_finite() => Ok(Self::normalized(base, coeffs, false)),
            _ => Err(QError::InvalidParameter(
                "a formal series needs a finite constant coefficient".into(),
            )),
        }
    }

    pub fn from_fn(base: QModulus, order: usize, f: impl Fn(usize) -> Complex64) -> Result<Self> {
        Self::new(base, (0..=order).map(f).collect())
    }

    /// Coefficients of the Ramanujan function `sum q^{n^2} (-x)^n / (q;q)_n`.
    pub fn ramanujan(base: QModulus, order: usize) -> Self {
        let q = base.value();
        let coeffs = (0..=order)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * base.pow((n * n) as i64) / qpochhammer_n(q, base, n)
            })
            .collect();
        Self::normalized(base, coeffs, false)
    }

    fn normalized(base: QModulus, mut coeffs: Vec<Complex64>, mut flushed: bool) -> Self {
        if let Some(bad) = coeffs.iter().position(|c| !c.is_finite()) {
            coeffs.truncate(bad.max(1));
        }
        for c in coeffs.iter_mut() {
            if *c != ZERO && c.norm() < FLUSH_BELOW {
                *c = ZERO;
                flushed = true;
            }
        }
        Self {
            base,
            coeffs,
            flushed,
        }
    }

    pub fn base(&self) -> QModulus {
        self.base
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest valid power N (coefficients `c_0..=c_N`).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn flushed(&self) -> bool {
        self.flushed
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(order + 1);
        s
    }

    /// Evaluates the truncated polynomial (Horner).
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            Err(QError::BaseMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::normalized(
            self.base,
            coeffs,
            self.flushed || other.flushed,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::normalized(
            self.base,
            self.coeffs.iter().map(|a| a * c).collect(),
            self.flushed,
        )
    }

    /// `sigma_q^l f` for any integer l: coefficient n becomes `q^{l n} c_n`.
    pub fn shifted(&self, l: i64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * self.base.pow(l * n as i64))
            .collect();
        Self::normalized(self.base, coeffs, self.flushed)
    }

    /// `x^m f`, keeping the original order N (top m coefficients dropped).
    pub fn times_monomial(&self, m: usize) -> Self {
        let n = self.coeffs.len();
        let mut coeffs = vec![ZERO; n];
        for (i, c) in self.coeffs.iter().enumerate().take(n.saturating_sub(m)) {
            coeffs[i + m] = *c;
        }
        Self::normalized(self.base, coeffs, self.flushed)
    }

    fn reweighted(&self, sign: i64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * self.base.tri(n as i64).powi(sign as i32))
            .collect();
        Self::normalized(self.base, coeffs, self.flushed)
    }

    /// Largest coefficientwise relative difference `|a-b| / max(|a|,|b|)` over the common prefix.
    pub fn max_rel_diff(&self, other: &Self) -> Result<f64> {
        self.check_base(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| {
                let scale = a.norm().max(b.norm());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).norm() / scale
                }
            })
            .fold(0.0, f64::max))
    }
}

/// One term `coeff * x^power * sigma_q^shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorTerm {
    pub power: u32,
    pub coeff: Complex64,
    pub shift: u32,
}

/// A q-difference operator with polynomial coefficients, `sum c x^m sigma_q^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct QdeOperator {
    base: QModulus,
    terms: Vec<OperatorTerm>,
}

impl QdeOperator {
    pub fn new(base: QModulus, terms: Vec<OperatorTerm>) -> Self {
        Self { base, terms }
    }

    fn term(power: u32, coeff: Complex64, shift: u32) -> OperatorTerm {
        OperatorTerm {
            power,
            coeff,
            shift,
        }
    }

    pub fn identity(base: QModulus) -> Self {
        Self::new(base, vec![Self::term(0, ONE, 0)])
    }

    pub fn sigma(base: QModulus) -> Self {
        Self::new(base, vec![Self::term(0, ONE, 1)])
    }

    /// `K x sigma^2 - sigma + 1`; `K = q` gives the Ramanujan equation.
    pub fn ramanujan_type(base: QModulus, k: Complex64) -> Self {
        Self::new(
            base,
            vec![
                Self::term(1, k, 2),
                Self::term(0, -ONE, 1),
                Self::term(0, ONE, 0),
            ],
        )
    }

    pub fn ramanujan(base: QModulus) -> Self {
        Self::ramanujan_type(base, base.value())
    }

    /// `sigma^2 + x sigma - 1`, satisfied by the q-Airy function.
    pub fn qairy(base: QModulus) -> Self {
        Self::new(
            base,
            vec![
                Self::term(0, ONE, 2),
                Self::term(1, ONE, 1),
                Self::term(0, -ONE, 0),
            ],
        )
    }

    pub fn base(&self) -> QModulus {
        self.base
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    pub fn max_power(&self) -> u32 {
        self.terms.iter().map(|t| t.power).max().unwrap_or(0)
    }

    /// Sum of two operators on the same base.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(QError::BaseMismatch);
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(Self::new(self.base, terms))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| OperatorTerm {
                coeff: t.coeff * c,
                ..*t
            })
            .collect();
        Self::new(self.base, terms)
    }

    /// Each term `c x^m u(q^l x)` evaluated at `x`, in term order.
    pub fn summands_at<F>(&self, u: F, x: Complex64) -> Result<Vec<Complex64>>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        self.terms
            .iter()
            .map(|t| Ok(t.coeff * x.powi(t.power as i32) * u(x * self.base.pow(t.shift as i64))?))
            .collect()
    }

    /// `(L u)(x)`.
    pub fn apply_at<F>(&self, u: F, x: Complex64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        Ok(self.summands_at(u, x)?.into_iter().sum())
    }
}

/// Applies `op` to a formal series. Coefficient n of `x^m sigma^l f` is
/// `q^{l(n-m)} c_{n-m}`; the result has order `N - max m`.
pub fn apply_operator(op: &QdeOperator, f: &FormalSeries) -> Result<FormalSeries> {
    if op.base != f.base {
        return Err(QError::BaseMismatch);
    }
    let drop = op.max_power() as usize;
    if drop > f.order() {
        return Err(QError::InvalidParameter(format!(
            "operator degree {drop} exceeds series order {}",
            f.order()
        )));
    }
    let out_order = f.order() - drop;
    let mut coeffs = vec![ZERO; out_order + 1];
    for t in op.terms() {
        let m = t.power as usize;
        for (n, slot) in coeffs.iter_mut().enumerate().skip(m) {
            let k = n - m;
            *slot += t.coeff * f.base.pow(t.shift as i64 * k as i64) * f.coeffs[k];
        }
    }
    Ok(FormalSeries::normalized(f.base, coeffs, f.flushed))
}

/// First-kind q-Borel transform: `a_n -> a_n q^{n(n-1)/2}`.
pub fn qborel_plus(f: &FormalSeries) -> FormalSeries {
    f.reweighted(1)
}

/// Second-kind q-Borel transform: `a_n -> a_n q^{-n(n-1)/2}`.
pub fn qborel_minus(f: &FormalSeries) -> FormalSeries {
    f.reweighted(-1)
}

/// Formal action of the first-kind q-Laplace transform on power series (inverse of [`qborel_plus`]).
pub fn qlaplace_plus_formal(g: &FormalSeries) -> FormalSeries {
    g.reweighted(-1)
}

/// Formal action of the second-kind q-Laplace transform on power series (inverse of [`qborel_minus`]).
pub fn qlaplace_minus_formal(g: &FormalSeries) -> FormalSeries {
    g.reweighted(1)
}

/// Both sides of `B^-(t^m sigma^l f) = q^{-m(m-1)/2} tau^m sigma^{l-m} B^- f`,
/// computed independently and truncated to the common order `N - m`.
///
/// For `l < m` the right side uses the formal inverse shift `q^{(l-m)n}`.
pub fn borel_minus_operator_image(
    m: usize,
    l: usize,
    f: &FormalSeries,
) -> Result<(FormalSeries, FormalSeries)> {
    let op = QdeOperator::new(
        f.base(),
        vec![OperatorTerm {
            power: m as u32,
            coeff: ONE,
            shift: l as u32,
        }],
    );
    let lhs = qborel_minus(&apply_operator(&op, f)?);
    let m_i = m as i64;
    let rhs = qborel_minus(f)
        .shifted(l as i64 - m_i)
        .times_monomial(m)
        .scale(f.base().tri(m_i).inv());
    let order = lhs.order().min(rhs.order()).min(f.order() - m);
    Ok((lhs.truncated(order), rhs.truncated(order)))
}
