//! The Ramanujan function, the q-Airy function, the Borel image `g` and its
//! residue sum, solutions at infinity and the resummed `2phi0`.

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::qcore::{
    e_exp_product, qpochhammer_inf, qpochhammer_inf_multi, qpochhammer_n, rphis_detailed,
    sum_terms, theta, QModulus, Spiral, Summed, Truncation, DEFAULT_DELTA,
};
use crate::transforms::{circle_integral, qlaplace_plus, ContourValue};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `A_q(x) = sum q^{n^2} (-x)^n / (q;q)_n`, entire.
pub fn ramanujan_aq(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Complex64> {
    ramanujan_aq_detailed(q, x, trunc).map(|s| s.value)
}

pub fn ramanujan_aq_detailed(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Summed> {
    if x.norm() == 0.0 {
        return Ok(Summed::exact(ONE));
    }
    let qv = q.value();
    // t_{n+1} / t_n = -x q^{2n+1} / (1 - q^{n+1})
    let terms = std::iter::successors(Some((ONE, ONE)), move |&(term, qn)| {
        let qn1 = qn * qv;
        Some((term * (-x) * qn * qn * qv / (ONE - qn1), qn1))
    })
    .map(|(term, _)| term);
    sum_terms(trunc, terms)
}

/// `Ai_q(x) = 1phi1(0; -q; q, -x)`, entire.
pub fn qairy_ai(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Complex64> {
    qairy_ai_detailed(q, x, trunc).map(|s| s.value)
}

pub fn qairy_ai_detailed(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Summed> {
    rphis_detailed(&[ZERO], &[-q.value()], q, -x, trunc)
}

/// Second solution of the q-Airy equation in theta-ratio form,
/// `theta(q^2 x) / theta(-q^2 x) * Ai_q(-x)`, defined off `q^Z`.
pub fn qairy_second(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Complex64> {
    qairy_second_detailed(q, x, trunc).map(|s| s.value)
}

pub fn qairy_second_detailed(q: QModulus, x: Complex64, trunc: &Truncation) -> Result<Summed> {
    if x.norm() == 0.0 {
        return Err(QError::ZeroArgument);
    }
    let q2 = q.squared().value();
    let ratio = theta(q, q2 * x, trunc)? / theta_nonzero(q, -q2 * x, trunc)?;
    Ok(qairy_ai_detailed(q, -x, trunc)?.scaled(ratio))
}

/// `theta_q(arg)`, failing with [`QError::ThetaZero`] on its zero spiral `-q^Z`.
pub fn theta_nonzero(q: QModulus, arg: Complex64, trunc: &Truncation) -> Result<Complex64> {
    if Spiral::new(-ONE, q, DEFAULT_DELTA)?.contains(arg) {
        return Err(QError::ThetaZero { arg });
    }
    theta(q, arg, trunc)
}

/// `g(tau) = 1/((-q^2 tau; q)_inf (q^2 tau; q)_inf)`, the second-kind Borel image of
/// the divergent solution at infinity. Poles at `tau = +-q^{-2-k}`, `k >= 0`.
pub fn g_borel_image(q: QModulus, tau: Complex64, trunc: &Truncation) -> Result<Complex64> {
    let first = q.pow(-2);
    for lead in [first, -first] {
        let poles = Spiral::new(lead, q, DEFAULT_DELTA)?;
        if let Some(n) = poles.nearest_in(tau, Some((i64::MIN, 0))) {
            if n.distance <= poles.delta() {
                return Err(QError::PoleHit {
                    point: tau,
                    pole: n.point,
                });
            }
        }
    }
    let q2 = q.squared().value();
    Ok(1.0 / qpochhammer_inf_multi(&[-q2 * tau, q2 * tau], q, trunc)?)
}

/// `(q, -1; q)_inf`, the common denominator of the residue sum.
fn residue_norm(q: QModulus, trunc: &Truncation) -> Result<Complex64> {
    qpochhammer_inf_multi(&[q.value(), -ONE], q, trunc)
}

/// Residue-sum form of the solution at infinity:
/// `[theta(q^2 t) Ai_q(-1/t) + theta(-q^2 t) Ai_q(1/t)] / (q, -1; q)_inf`.
///
/// `abs_sum` counts every series term times its theta prefactor, so `condition()`
/// exposes cancellation both inside the series and between the two summands.
pub fn f_via_residues(q: QModulus, t: Complex64, trunc: &Truncation) -> Result<Summed> {
    if t.norm() == 0.0 {
        return Err(QError::ZeroArgument);
    }
    let q2 = q.squared().value();
    let mq = [-q.value()];
    let norm = residue_norm(q, trunc)?;
    let a =
        rphis_detailed(&[ZERO], &mq, q, 1.0 / t, trunc)?.scaled(theta(q, q2 * t, trunc)? / norm);
    let b =
        rphis_detailed(&[ZERO], &mq, q, -1.0 / t, trunc)?.scaled(theta(q, -q2 * t, trunc)? / norm);
    Ok(a.plus(b))
}

/// Gauge factor `E(t) = 1/theta(-q^2 t)` of the solution at infinity.
pub fn e_gauge(q: QModulus, t: Complex64, trunc: &Truncation) -> Result<Complex64> {
    let arg = -q.squared().value() * t;
    Ok(1.0 / theta_nonzero(q, arg, trunc)?)
}

/// Convergent solution at infinity `z(t) = E(t) f(t)`, `t = 1/x`, with
/// `f(t) = A_{q^2}(-q^3 t^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionAtInfinity {
    pub q: QModulus,
    pub t: Complex64,
    pub prefactor: Complex64,
    pub series_factor: Complex64,
}

impl SolutionAtInfinity {
    pub fn new(q: QModulus, t: Complex64, trunc: &Truncation) -> Result<Self> {
        if t.norm() == 0.0 {
            return Err(QError::ZeroArgument);
        }
        let q3 = q.pow(3);
        Ok(Self {
            q,
            t,
            prefactor: e_gauge(q, t, trunc)?,
            series_factor: ramanujan_aq(q.squared(), -q3 * t * t, trunc)?,
        })
    }

    pub fn value(&self) -> Complex64 {
        self.prefactor * self.series_factor
    }

    /// The value with the magnitudes of the series terms, for conditioning.
    pub fn detailed(&self, trunc: &Truncation) -> Result<Summed> {
        let arg = -self.q.pow(3) * self.t * self.t;
        Ok(ramanujan_aq_detailed(self.q.squared(), arg, trunc)?.scaled(self.prefactor))
    }
}

fn check_two_f_zero_domain(q: QModulus, lambda: Complex64, x: Complex64) -> Result<()> {
    if x.norm() == 0.0 || lambda.norm() == 0.0 {
        return Err(QError::ZeroArgument);
    }
    Spiral::new(ONE, q, DEFAULT_DELTA)?.ensure_clear(lambda)?;
    Spiral::new(-lambda, q, DEFAULT_DELTA)?.ensure_clear(x)
}

/// Resummation of the divergent `2phi0(0, 0; -; q, -x/q)` along `[lambda; q]`:
/// the first-kind Laplace transform of `xi -> e_q(xi/q)` in product form.
pub fn two_f_zero(
    q: QModulus,
    lambda: Complex64,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Summed> {
    check_two_f_zero_domain(q, lambda, x)?;
    let qv = q.value();
    qlaplace_plus(|xi| e_exp_product(q, xi / qv, trunc), q, lambda, x, trunc)
}

/// The two summands of the closed form of the resummed `2phi0`, kept apart so
/// that checks can measure cancellation or tamper with the normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFZeroClosed {
    /// `(q;q)_inf theta_{q^2}(-lambda^2/(qx)) / (theta(-lambda/q) theta(lambda/x)) * 1phi1(0; q; q^2, q^2/x)`
    pub first: Complex64,
    /// `(q;q)_inf theta_{q^2}(-lambda^2/x) / (theta(-lambda/q) theta(lambda/x)) * (lambda/x) * 1phi1(0; q^3; q^2, q^3/x)`,
    /// still to be divided by `1 - q`
    pub second: Complex64,
    pub one_minus_q: Complex64,
    /// Magnitude sums of the series terms behind `first` and `second`.
    pub first_abs: f64,
    pub second_abs: f64,
}

impl TwoFZeroClosed {
    pub fn value(&self) -> Complex64 {
        self.first + self.second / self.one_minus_q
    }

    /// The same sum with the `1/(1-q)` factor dropped.
    pub fn value_without_normalisation(&self) -> Complex64 {
        self.first + self.second
    }

    pub fn abs_sum(&self) -> f64 {
        self.first_abs + self.second_abs / self.one_minus_q.norm()
    }
}

pub fn two_f_zero_closed_parts(
    q: QModulus,
    lambda: Complex64,
    x: Complex64,
    trunc: &Truncation,
) -> Result<TwoFZeroClosed> {
    check_two_f_zero_domain(q, lambda, x)?;
    let qv = q.value();
    let q2 = q.squared();
    let l2 = lambda * lambda;
    let common = qpochhammer_inf(qv, q, trunc)?
        / (theta_nonzero(q, -lambda / qv, trunc)? * theta_nonzero(q, lambda / x, trunc)?);
    let first = rphis_detailed(&[ZERO], &[qv], q2, q2.value() / x, trunc)?
        .scaled(common * theta(q2, -l2 / (qv * x), trunc)?);
    let q3 = q.pow(3);
    let second = rphis_detailed(&[ZERO], &[q3], q2, q3 / x, trunc)?
        .scaled(common * theta(q2, -l2 / x, trunc)? * (lambda / x));
    Ok(TwoFZeroClosed {
        first: first.value,
        second: second.value,
        one_minus_q: ONE - qv,
        first_abs: first.abs_sum,
        second_abs: second.abs_sum,
    })
}

/// Closed form of the resummed `2phi0`, bare (without the overall `theta_q(x)`).
pub fn two_f_zero_closed(
    q: QModulus,
    lambda: Complex64,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Complex64> {
    two_f_zero_closed_parts(q, lambda, x, trunc).map(|p| p.value())
}

/// `theta_q(x)` times the closed form: the second solution of the Ramanujan equation.
pub fn theta_two_f_zero_closed(
    q: QModulus,
    lambda: Complex64,
    x: Complex64,
    trunc: &Truncation,
) -> Result<Complex64> {
    Ok(theta(q, x, trunc)? * two_f_zero_closed(q, lambda, x, trunc)?)
}

/// Closed value of `Res_{tau = lambda q^{-k}} 1/((tau/lambda; q)_inf tau)`:
/// `(-1)^{k+1} q^{k(k+1)/2} / ((q;q)_k (q;q)_inf)`, independent of `lambda`.
pub fn residue_closed(q: QModulus, k: usize, trunc: &Truncation) -> Result<Complex64> {
    let ki = k as i64;
    let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
    Ok(sign * q.pow(ki * (ki + 1) / 2)
        / (qpochhammer_n(q.value(), q, k) * qpochhammer_inf(q.value(), q, trunc)?))
}

/// The same residue by the circle rule on `|tau - lambda q^{-k}| = |lambda q^{-k}| (1 - |q|) / 2`,
/// which encloses no other pole.
pub fn residue_by_quadrature(
    q: QModulus,
    lambda: Complex64,
    k: usize,
    trunc: &Truncation,
) -> Result<ContourValue> {
    if lambda.norm() == 0.0 {
        return Err(QError::ZeroArgument);
    }
    let pole = lambda * q.pow(-(k as i64));
    let radius = 0.5 * pole.norm() * (1.0 - q.value().norm());
    circle_integral(
        |tau| Ok(1.0 / (qpochhammer_inf(tau / lambda, q, trunc)? * tau)),
        pole,
        radius,
        trunc,
    )
}

/// Partial sums of the divergent `2phi0(0, 0; -; q, -x/q) = sum q^{-n(n+1)/2} x^n / (q;q)_n`
/// cut before the smallest term.
pub fn two_f_zero_optimal_truncation(q: QModulus, x: Complex64) -> Complex64 {
    let mut sum = ZERO;
    let mut term = ONE;
    let mut n = 0i64;
    loop {
        sum += term;
        // t_{n+1}/t_n = x q^{-(n+1)} / (1 - q^{n+1})
        let next = term * x * q.pow(-(n + 1)) / (ONE - q.pow(n + 1));
        if next.norm() >= term.norm() || n > 200 {
            return sum;
        }
        term = next;
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{default_contour_radius, qlaplace_minus};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm())
    }

    fn setup(q: f64) -> (QModulus, Truncation) {
        (QModulus::real(q).unwrap(), Truncation::default())
    }

    #[test]
    fn aq_at_zero_and_brute_force() {
        let (q, t) = setup(0.5);
        assert_eq!(ramanujan_aq(q, ZERO, &t).unwrap(), ONE);
        let mut direct = ZERO;
        let mut poch = 1.0;
        for n in 0..40 {
            if n > 0 {
                poch *= 1.0 - 0.5f64.powi(n);
            }
            direct += cx(0.5f64.powi(n * n) * (-2.0f64).powi(n) / poch, 0.0);
        }
        assert!(rel(ramanujan_aq(q, cx(2.0, 0.0), &t).unwrap(), direct) < 1e-15);
    }

    #[test]
    fn aq_solves_ramanujan_equation() {
        let (q, t) = setup(0.5);
        let x = cx(1.0, 0.3);
        let a = |y| ramanujan_aq(q, y, &t).unwrap();
        let qv = q.value();
        let r = qv * x * a(qv * qv * x) - a(qv * x) + a(x);
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn qairy_solutions() {
        let (q, t) = setup(0.5);
        assert_eq!(qairy_ai(q, ZERO, &t).unwrap(), ONE);
        let x = cx(0.8, -0.2);
        let qv = q.value();
        let ai = |y| qairy_ai(q, y, &t).unwrap();
        assert!((ai(qv * qv * x) + x * ai(qv * x) - ai(x)).norm() < 1e-12);
        let u = |y| qairy_second(q, y, &t).unwrap();
        let r = u(qv * qv * x) + x * u(qv * x) - u(x);
        assert!(r.norm() < 1e-12 * u(x).norm().max(1.0));
        assert!(matches!(
            qairy_second(q, cx(0.25, 0.0), &t),
            Err(QError::ThetaZero { .. })
        ));
    }

    #[test]
    fn g_values_and_equation() {
        let (q, t) = setup(0.5);
        assert_eq!(g_borel_image(q, ZERO, &t).unwrap(), ONE);
        let mut prod = ONE;
        for j in 0..80 {
            let f = 0.5f64.powi(2 + j);
            prod *= (1.0 + f * 0.3) * (1.0 - f * 0.3);
        }
        assert!(rel(g_borel_image(q, cx(0.3, 0.0), &t).unwrap(), 1.0 / prod) < 1e-14);
        let tau = cx(0.7, -1.1);
        let lhs = g_borel_image(q, 0.5 * tau, &t).unwrap();
        let rhs = (1.0 - 0.0625 * tau * tau) * g_borel_image(q, tau, &t).unwrap();
        assert!(rel(lhs, rhs) < 1e-14);
        assert!(matches!(
            g_borel_image(q, cx(-8.0, 0.0), &t),
            Err(QError::PoleHit { .. })
        ));
        assert!(g_borel_image(q, cx(2.0, 0.0), &t).is_ok());
    }

    #[test]
    fn residue_form_matches_aq_and_contour() {
        let (q, t) = setup(0.5);
        for tt in [cx(2.0, 0.0), cx(10.0, 0.0), cx(-1.0, 3.0)] {
            let f = f_via_residues(q, tt, &t).unwrap();
            let a = ramanujan_aq(q.squared(), -q.pow(3) * tt * tt, &t).unwrap();
            assert!(rel(f.value, a) < 1e-12, "t={tt}");
        }
        let tt = cx(2.0, 0.0);
        let l = qlaplace_minus(|tau| g_borel_image(q, tau, &t), q, tt, 1.0, &t).unwrap();
        assert!(rel(l.value, f_via_residues(q, tt, &t).unwrap().value) < 1e-12);
        assert_eq!(default_contour_radius(q), 1.0);
        assert!(f_via_residues(q, ZERO, &t).is_err());
    }

    #[test]
    fn solution_at_infinity() {
        let (q, t) = setup(0.5);
        let tt = cx(0.9, 0.4);
        let qv = q.value();
        let z = |s| SolutionAtInfinity::new(q, s, &t).unwrap().value();
        let r = -z(qv * qv * tt) + z(qv * tt) / (qv * qv * tt) + z(tt);
        assert!(r.norm() < 1e-12 * z(tt).norm());
        let e = |s| e_gauge(q, s, &t).unwrap();
        assert!(rel(e(qv * tt), -qv * qv * tt * e(tt)) < 1e-13);
        assert!(rel(e(qv * qv * tt), q.pow(5) * tt * tt * e(tt)) < 1e-13);
        assert!(matches!(
            SolutionAtInfinity::new(q, cx(4.0, 0.0), &t),
            Err(QError::ThetaZero { .. })
        ));
    }

    #[test]
    fn resummation_matches_closed_form() {
        let (q, t) = setup(0.5);
        let lam = cx(0.7, 0.0);
        let x = cx(2.4, 0.0);
        let p = two_f_zero(q, lam, x, &t).unwrap().value;
        let cf = two_f_zero_closed(q, lam, x, &t).unwrap();
        assert!(rel(p, cf) < 1e-11, "{p} vs {cf}");
        let moved = two_f_zero_closed(q, lam * q.value(), x, &t).unwrap();
        assert!(rel(moved, cf) < 1e-12);
        assert!(two_f_zero_closed(q, lam, cx(-0.7, 0.0), &t).is_err());
        assert!(two_f_zero(q, cx(1.0, 0.0), x, &t).is_err());
    }

    #[test]
    fn resummation_close_to_optimal_truncation_near_zero() {
        let (q, t) = setup(0.5);
        let x = cx(0.01, 0.004);
        let p = two_f_zero(q, cx(0.7, 0.0), x, &t).unwrap().value;
        assert!(rel(p, two_f_zero_optimal_truncation(q, x)) < 1e-3);
    }

    #[test]
    fn residue_lemma_first_item() {
        let (q, t) = setup(0.5);
        for k in 0..=5 {
            let quad = residue_by_quadrature(q, cx(0.7, 0.2), k, &t).unwrap();
            assert!(
                rel(quad.value, residue_closed(q, k, &t).unwrap()) < 1e-12,
                "k={k}"
            );
        }
    }
}
