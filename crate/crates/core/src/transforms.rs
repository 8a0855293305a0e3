//! Analytic q-Borel/q-Laplace machinery.
//!
//! - second kind: `(L^- g)(t) = (1/2 pi i) \oint_{|tau|=r} g(tau) theta(t/tau) dtau/tau`,
//!   evaluated with the uniform rule on the circle (exact for Laurent polynomials of
//!   degree below the node count), doubling nodes until successive values settle;
//! - first kind: `(L^+ phi)(x) = sum_{n in Z} phi(lambda q^n) / theta(lambda q^n / x)`;
//! - the covering transformation `t^2 = x`, `p = sqrt(q)` on q-difference operators.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::qcore::{sum_bilateral, theta, QModulus, Spiral, Summed, Truncation, DEFAULT_DELTA};
use crate::series::{FormalSeries, OperatorTerm, QdeOperator};

pub const INITIAL_NODES: usize = 64;
pub const MAX_NODES: usize = 4096;

/// Streak of negligible terms required on each tail of the first-kind Laplace sum.
const LAPLACE_PLUS_STREAK: usize = 5;

/// Value of a circle integral with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourValue {
    pub value: Complex64,
    pub nodes: usize,
    /// Mean of `|integrand * (tau - centre)|` over the nodes: the scale at which
    /// rounding enters the result.
    pub abs_mean: f64,
}

impl ContourValue {
    pub fn condition(&self) -> f64 {
        self.abs_mean / self.value.norm().max(1e-300)
    }
}

/// `(1/2 pi i) \oint f(tau) dtau` over `|tau - centre| = radius` by the uniform
/// trapezoid rule, starting at [`INITIAL_NODES`] and doubling to at most [`MAX_NODES`].
///
/// Successive values must agree to `10 eps` relative to the integrand scale.
pub fn circle_integral<F>(
    f: F,
    centre: Complex64,
    radius: f64,
    trunc: &Truncation,
) -> Result<ContourValue>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(QError::InvalidParameter(format!(
            "contour radius {radius} must be positive"
        )));
    }
    // integrand times (tau - centre): the mean of this over the nodes is the integral
    let sample = |theta_angle: f64| -> Result<(Complex64, f64)> {
        let w = Complex64::from_polar(radius, theta_angle);
        let tau = centre + w;
        let v = f(tau).map_err(|_| QError::PoleOnContour { tau })? * w;
        if !v.is_finite() {
            return Err(QError::PoleOnContour { tau });
        }
        Ok((v, v.norm()))
    };

    let mut nodes = INITIAL_NODES;
    let (mut sum, mut abs) = (Complex64::new(0.0, 0.0), 0.0);
    for j in 0..nodes {
        let (v, a) = sample(2.0 * PI * j as f64 / nodes as f64)?;
        sum += v;
        abs += a;
    }
    let mut current = sum / nodes as f64;
    while nodes < MAX_NODES {
        // midpoints of the previous rule
        for j in 0..nodes {
            let (v, a) = sample(PI * (2 * j + 1) as f64 / nodes as f64)?;
            sum += v;
            abs += a;
        }
        nodes *= 2;
        let next = sum / nodes as f64;
        let scale = abs / nodes as f64;
        let settled = (next - current).norm() <= 10.0 * trunc.eps * scale;
        current = next;
        if settled {
            return Ok(ContourValue {
                value: current,
                nodes,
                abs_mean: scale,
            });
        }
    }
    Err(QError::NoConvergence { nodes })
}

/// Default contour radius `min(1, 0.5/|q^2|)`.
pub fn default_contour_radius(q: QModulus) -> f64 {
    (0.5 / q.squared().value().norm()).min(1.0)
}

/// Largest admissible radius: the open bound `1/|q^2|`.
pub fn contour_radius_bound(q: QModulus) -> f64 {
    1.0 / q.squared().value().norm()
}

/// Second-kind q-Laplace transform of `g` at `t` on the circle `|tau| = r`.
pub fn qlaplace_minus<G>(
    g: G,
    q: QModulus,
    t: Complex64,
    r: f64,
    trunc: &Truncation,
) -> Result<ContourValue>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if t.norm() == 0.0 {
        return Err(QError::ZeroArgument);
    }
    if !(r > 0.0 && r < contour_radius_bound(q)) {
        return Err(QError::InvalidParameter(format!(
            "contour radius {r} must lie in (0, 1/|q^2|)"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    circle_integral(
        |tau| Ok(g(tau)? * theta(q, t / tau, trunc)? / tau),
        zero,
        r,
        trunc,
    )
}

/// Picks the radius in `(0, r_max)` minimising the sampled integrand magnitude
/// `mean |g(tau) theta(t/tau)|` on a coarse ring. Rounding error of the circle rule
/// scales with that magnitude, so this is the best-conditioned contour among circles.
pub fn best_contour_radius<G>(
    g: G,
    q: QModulus,
    t: Complex64,
    r_max: f64,
    trunc: &Truncation,
) -> f64
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    const PROBES: usize = 48;
    const RING: usize = 16;
    let hi = r_max.ln();
    let lo = hi - 30.0;
    let mut best = (f64::INFINITY, (0.5 * r_max).min(1.0));
    for i in 0..PROBES {
        let r = (lo + (hi - lo) * i as f64 / PROBES as f64).exp();
        let mut total = 0.0;
        for j in 0..RING {
            let tau = Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / RING as f64);
            let v = g(tau).and_then(|gv| Ok(gv * theta(q, t / tau, trunc)?));
            total += v.map(|v| v.norm()).unwrap_or(f64::INFINITY);
        }
        if total.is_finite() && total < best.0 {
            best = (total, r);
        }
    }
    best.1
}

/// `ln` of `1/theta(lambda q^n / x)` up to the constant `1/theta(lambda/x)`, from the
/// shift law `theta(q^n y) = q^{-n(n-1)/2} y^{-n} theta(y)`. Working in logs keeps far
/// terms finite when `phi` and theta both leave the f64 range.
fn log_kernel(q: QModulus, y_ln: Complex64, n: i64) -> Complex64 {
    let tri = (n as f64) * (n as f64 - 1.0) / 2.0;
    y_ln * n as f64 + q.ln() * tri
}

fn check_plus_domain(
    q: QModulus,
    lambda: Complex64,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Complex64> {
    if x.norm() == 0.0 || lambda.norm() == 0.0 {
        return Err(QError::ZeroArgument);
    }
    // theta(lambda q^n / x) = 0 exactly when x lies on [-lambda; q]
    Spiral::new(-lambda, q, DEFAULT_DELTA)?.ensure_clear(x)?;
    theta(q, lambda / x, trunc)
}

/// First-kind q-Laplace transform `sum_{n in Z} phi(lambda q^n) / theta(lambda q^n / x)`.
pub fn qlaplace_plus<P>(
    phi: P,
    q: QModulus,
    lambda: Complex64,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Summed>
where
    P: Fn(Complex64) -> Result<Complex64>,
{
    let theta_y = check_plus_domain(q, lambda, x, trunc)?;
    let y_ln = (lambda / x).ln();
    let trunc = trunc.with_min_streak(LAPLACE_PLUS_STREAK);
    sum_bilateral(&trunc, |n| {
        let xi = lambda * q.pow(n);
        let kernel = log_kernel(q, y_ln, n).exp() / theta_y;
        if kernel.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = phi(xi)?;
        let term = v * kernel;
        if term.is_finite() {
            Ok(term)
        } else {
            Err(QError::Overflow { point: xi })
        }
    })
}

/// Spiral base of modulus `modulus` on the ray through `x`. With it `lambda q^n / x`
/// is a positive real for real `q`, so the first-kind sum has no rotating terms;
/// the transform of an entire function does not depend on the choice.
pub fn ray_lambda(modulus: f64, x: Complex64) -> Complex64 {
    x * (modulus / x.norm())
}

/// [`qlaplace_plus`] of a power series in its own base, with each coefficient folded
/// into the log kernel so that high powers at large `lambda q^n` stay representable.
pub fn qlaplace_plus_series(
    phi: &FormalSeries,
    lambda: Complex64,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Summed> {
    let q = phi.base();
    let theta_y = check_plus_domain(q, lambda, x, trunc)?;
    let y_ln = (lambda / x).ln();
    let (lambda_ln, q_ln) = (lambda.ln(), q.ln());
    let coeffs: Vec<(usize, Complex64)> = phi
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| (j, c.ln()))
        .collect();
    let trunc = trunc.with_min_streak(LAPLACE_PLUS_STREAK);
    sum_bilateral(&trunc, |n| {
        let base = log_kernel(q, y_ln, n);
        let xi_ln = lambda_ln + q_ln * n as f64;
        let term: Complex64 = coeffs
            .iter()
            .map(|&(j, c_ln)| (c_ln + xi_ln * j as f64 + base).exp())
            .sum();
        Ok(term / theta_y)
    })
}

/// Covering transformation `t^2 = x`, `v(t) = u(t^2)`, `p = sqrt(q)`:
/// `x^m sigma_q^l` becomes `t^{2m} sigma_p^l`, since `u(q^l t^2) = v(p^l t)`.
pub fn covering_transform(op: &QdeOperator) -> QdeOperator {
    let terms = op
        .terms()
        .iter()
        .map(|t| OperatorTerm {
            power: 2 * t.power,
            ..*t
        })
        .collect();
    QdeOperator::new(op.base().sqrt(), terms)
}
