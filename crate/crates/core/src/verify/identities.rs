//! Left and right sides of every identity, evaluated along separate code paths.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IdentityCheck, IdentityId, Mutation};
use crate::error::{QError, Result};
use crate::qcore::{
    big_e_exp_detailed, e_exp, e_exp_product, qpochhammer_inf, qpochhammer_inf_multi,
    qpochhammer_inf_shifted_pole, rphis, rphis_detailed, theta, QModulus, Spiral, Summed,
    Truncation, DEFAULT_DELTA,
};
use crate::series::{borel_minus_operator_image, qborel_minus, qborel_plus, FormalSeries};
use crate::special::{
    f_via_residues, g_borel_image, qairy_ai_detailed, qairy_second_detailed, ramanujan_aq,
    ramanujan_aq_detailed, residue_by_quadrature, residue_closed, theta_nonzero, two_f_zero,
    two_f_zero_closed_parts, SolutionAtInfinity,
};
use crate::transforms::{
    best_contour_radius, contour_radius_bound, qlaplace_minus, qlaplace_plus_series, ray_lambda,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub const DEFAULT_LAMBDA: Complex64 = Complex64 { re: 0.7, im: 0.0 };
/// Spiral base used by the first-kind round trip when the check has none.
pub const ROUND_TRIP_LAMBDA: Complex64 = Complex64 { re: 1.3, im: 0.0 };
pub const DEFAULT_ABC: [Complex64; 3] = [
    Complex64 { re: -4.0, im: 0.0 },
    Complex64 { re: 3.0, im: 0.0 },
    Complex64 { re: 0.5, im: 0.0 },
];
/// Largest shift and lower-operator power exercised by the operational lemma.
pub const OPERATIONAL_MAX: usize = 5;
/// Order of the Ramanujan series fed to the operational lemma: `q^{n^2 + 5n}`
/// stays representable for `|q| >= 0.3`.
pub const OPERATIONAL_ORDER: usize = 20;
/// Seed of the test polynomial used by the analytic round trips.
pub const POLY_SEED: u64 = 0x5eed;

/// Both sides at one point, plus the condition estimate of the right side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub condition: f64,
}

impl PointEval {
    fn new(lhs: Complex64, rhs: Complex64, rhs_summands: &[Complex64]) -> Self {
        let abs: f64 = rhs_summands.iter().map(|z| z.norm()).sum();
        Self {
            lhs,
            rhs,
            condition: condition(abs, rhs),
        }
    }

    /// Condition taken from every series term behind the right side.
    fn summed(lhs: Complex64, rhs: Summed) -> Self {
        Self {
            lhs,
            rhs: rhs.value,
            condition: rhs.condition().max(1.0),
        }
    }

    fn with_condition(lhs: Complex64, rhs: Complex64, condition: f64) -> Self {
        Self {
            lhs,
            rhs,
            condition,
        }
    }

    pub fn rel_err(&self) -> f64 {
        rel_err(self.lhs, self.rhs)
    }
}

pub fn rel_err(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300)
}

fn condition(abs_sum: f64, value: Complex64) -> f64 {
    if abs_sum == 0.0 {
        1.0
    } else {
        (abs_sum / value.norm().max(1e-300)).max(1.0)
    }
}

/// Keeps the sub-check with the largest relative error.
fn worst(evals: impl IntoIterator<Item = PointEval>) -> Result<PointEval> {
    evals
        .into_iter()
        .max_by(|a, b| a.rel_err().total_cmp(&b.rel_err()))
        .ok_or(QError::EmptyGrid)
}

/// Parameters shared by every point of a check.
pub(crate) struct Context<'a> {
    pub q: QModulus,
    pub lambda: Complex64,
    pub abc: [Complex64; 3],
    pub trunc: &'a Truncation,
    pub mutation: Option<Mutation>,
    pub poly: FormalSeries,
}

impl<'a> Context<'a> {
    pub fn new(check: &'a IdentityCheck) -> Result<Self> {
        Ok(Self {
            q: check.q,
            lambda: check.lambda.unwrap_or(match check.id {
                IdentityId::FormalInverses => ROUND_TRIP_LAMBDA,
                _ => DEFAULT_LAMBDA,
            }),
            abc: check.abc.unwrap_or(DEFAULT_ABC),
            trunc: &check.trunc,
            mutation: check.mutation,
            poly: test_polynomial(check.q, check.poly_degree, POLY_SEED)?,
        })
    }
}

/// Polynomial of the given degree with coefficients uniform in the unit square.
pub fn test_polynomial(q: QModulus, degree: usize, seed: u64) -> Result<FormalSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FormalSeries::new(q, coeffs)
}

/// Parameter-level exclusions: failing these rejects the whole check.
pub(crate) fn validate(id: IdentityId, ctx: &Context) -> Result<()> {
    let q = ctx.q;
    match id {
        IdentityId::Thm2f0 | IdentityId::Qde2f0Resummed => {
            if ctx.lambda.norm() == 0.0 {
                return Err(QError::ZeroArgument);
            }
            Spiral::new(ONE, q, DEFAULT_DELTA)?.ensure_clear(ctx.lambda)
        }
        IdentityId::FormalInverses => {
            if ctx.lambda.norm() == 0.0 {
                return Err(QError::ZeroArgument);
            }
            Ok(())
        }
        IdentityId::Watson => {
            let [a, b, c] = ctx.abc;
            if a.norm() == 0.0 || b.norm() == 0.0 {
                return Err(QError::ZeroArgument);
            }
            let qv = q.value();
            // lower parameters of all three series
            for (index, lower) in [c, a * qv / b, b * qv / a].into_iter().enumerate() {
                if let Some(n) =
                    Spiral::new(ONE, q, DEFAULT_DELTA)?.nearest_in(lower, Some((i64::MIN, 0)))
                {
                    if n.distance <= DEFAULT_DELTA {
                        return Err(QError::BadLowerParameter {
                            index,
                            power: -n.index,
                        });
                    }
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Point-level exclusion, or `None` when `x` may be evaluated.
pub(crate) fn exclusion(id: IdentityId, ctx: &Context, x: Complex64) -> Result<Option<String>> {
    let q = ctx.q;
    if x.norm() == 0.0 && id.needs_nonzero_point() {
        return Ok(Some("x = 0".into()));
    }
    let on = |lead: Complex64, base: QModulus, what: &str| -> Result<Option<String>> {
        let s = Spiral::new(lead, base, DEFAULT_DELTA)?;
        Ok(s.nearest(x).filter(|n| n.distance <= s.delta()).map(|n| {
            format!(
                "x near {what} spiral {s} (index {}, distance {:.2e})",
                n.index, n.distance
            )
        }))
    };
    let qv = q.value();
    Ok(match id {
        IdentityId::Watson => {
            let [a, b, c] = ctx.abc;
            let y = c * qv / (a * b * x);
            if x.norm() >= 1.0 {
                Some(format!("|x| = {:.4} outside the unit disc", x.norm()))
            } else if y.norm() >= 1.0 {
                Some(format!("|cq/(abx)| = {:.4} not below 1", y.norm()))
            } else {
                on(ONE, q, "q^Z")?
            }
        }
        // theta(-x) vanishes on q^Z
        IdentityId::ThmEqEq | IdentityId::LemmaAlt => on(ONE, q, "q^Z")?,
        IdentityId::Thm2f0 | IdentityId::Qde2f0Resummed => on(-ctx.lambda, q, "[-lambda; q]")?,
        IdentityId::QdeQairy => None,
        // E(t) = 1/theta(-q^2 t) has poles on q^Z
        IdentityId::QdeInfinity => on(ONE, q, "q^Z")?,
        // grid points serve as the spiral base lambda, which must avoid q^Z
        IdentityId::ResidueLemma => on(ONE, q, "q^Z")?,
        _ => None,
    })
}

pub(crate) fn evaluate(id: IdentityId, ctx: &Context, x: Complex64) -> Result<PointEval> {
    let q = ctx.q;
    let t = ctx.trunc;
    let qv = q.value();
    let q2 = q.squared();
    match id {
        IdentityId::Watson => {
            let [a, b, c] = ctx.abc;
            let lhs = rphis(&[a, b], &[c], q, x, t)?;
            let y = c * qv / (a * b * x);
            let den = qpochhammer_inf_multi(&[c, x, qv / x], q, t)?;
            let t1 = rphis_detailed(&[a, a * qv / c], &[a * qv / b], q, y, t)?.scaled(
                qpochhammer_inf_multi(&[b, c / a, a * x, qv / (a * x)], q, t)?
                    / (den * qpochhammer_inf(b / a, q, t)?),
            );
            let t2 = rphis_detailed(&[b, b * qv / c], &[b * qv / a], q, y, t)?.scaled(
                qpochhammer_inf_multi(&[a, c / b, b * x, qv / (b * x)], q, t)?
                    / (den * qpochhammer_inf(a / b, q, t)?),
            );
            Ok(PointEval::summed(lhs, t1.plus(t2)))
        }
        IdentityId::IsmailZhang => {
            let lhs = ramanujan_aq(q, x, t)?;
            let q2v = q2.value();
            let norm = qpochhammer_inf(qv, q2, t)?;
            let t1 = rphis_detailed(&[ZERO], &[qv], q2, q2v / x, t)?
                .scaled(qpochhammer_inf_multi(&[qv * x, qv / x], q2, t)? / norm);
            let q3 = q.pow(3);
            let t2 = rphis_detailed(&[ZERO], &[q3], q2, q3 / x, t)?.scaled(
                -qv * qpochhammer_inf_multi(&[q2v * x, 1.0 / x], q2, t)? / ((ONE - qv) * norm),
            );
            Ok(PointEval::summed(lhs, t1.plus(t2)))
        }
        IdentityId::ThmRamanujanQairy => {
            let lhs = ramanujan_aq(q2, -q.pow(3) / (x * x), t)?;
            let norm = qpochhammer_inf_multi(&[qv, -ONE], q, t)?;
            let t1 = qairy_ai_detailed(q, -x, t)?.scaled(theta(q, x / qv, t)? / norm);
            let t2 = qairy_ai_detailed(q, x, t)?.scaled(theta(q, -x / qv, t)? / norm);
            Ok(PointEval::summed(lhs, t1.plus(t2)))
        }
        IdentityId::ThmEqEq => {
            let lhs = if x.norm() < 1.0 {
                e_exp(q, x, t)?
            } else {
                e_exp_product(q, x, t)?
            };
            let rhs = big_e_exp_detailed(q, -qv / x, t)?
                .scaled(qpochhammer_inf(qv, q, t)? / theta_nonzero(q, -x, t)?);
            Ok(PointEval::summed(lhs, rhs))
        }
        IdentityId::LemmaAlt => {
            let xq = x / qv;
            let lhs = if xq.norm() < 1.0 {
                e_exp(q, xq, t)?
            } else {
                e_exp_product(q, xq, t)?
            };
            let pre = qpochhammer_inf(qv, q, t)? / theta_nonzero(q, -xq, t)?;
            let x2 = x * x;
            let t1 = rphis_detailed(&[], &[qv], q2, q.pow(5) / x2, t)?.scaled(pre);
            let t2 = rphis_detailed(&[], &[q.pow(3)], q2, q.pow(7) / x2, t)?
                .scaled(-pre * q2.value() / ((ONE - qv) * x));
            Ok(PointEval::summed(lhs, t1.plus(t2)))
        }
        IdentityId::Thm2f0 => {
            let lhs = two_f_zero(q, ctx.lambda, x, t)?.value;
            let parts = two_f_zero_closed_parts(q, ctx.lambda, x, t)?;
            let rhs = match ctx.mutation {
                Some(Mutation::DropOneMinusQ) => parts.value_without_normalisation(),
                None => parts.value(),
            };
            Ok(PointEval::with_condition(
                lhs,
                rhs,
                condition(parts.abs_sum(), rhs),
            ))
        }
        IdentityId::QdeRamanujan => {
            let u = |y| ramanujan_aq_detailed(q, y, t);
            // u(x) = u(qx) - qx u(q^2 x)
            let rhs = u(qv * x)?.plus(u(qv * qv * x)?.scaled(-qv * x));
            Ok(PointEval::summed(u(x)?.value, rhs))
        }
        IdentityId::QdeQairy => {
            // u(x) = u(q^2 x) + x u(qx), for Ai_q and the theta-ratio solution
            let residual = |u: &dyn Fn(Complex64) -> Result<Summed>| -> Result<PointEval> {
                let rhs = u(qv * qv * x)?.plus(u(qv * x)?.scaled(x));
                Ok(PointEval::summed(u(x)?.value, rhs))
            };
            let mut evals = vec![residual(&|y| qairy_ai_detailed(q, y, t))?];
            if let Ok(second) = residual(&|y| qairy_second_detailed(q, y, t)) {
                evals.push(second);
            }
            worst(evals)
        }
        IdentityId::QdeTheta => {
            let th = |y| theta(q, y, t);
            let base = th(x)?;
            let mut evals = Vec::new();
            for k in [-2i64, -1, 1, 2, 3] {
                let lhs = th(q.pow(k) * x)?;
                let rhs = q.tri(k).inv() * x.powi(-k as i32) * base;
                evals.push(PointEval::new(lhs, rhs, &[rhs]));
            }
            if x.norm() > 0.0 {
                let rhs = base / x;
                evals.push(PointEval::new(th(1.0 / x)?, rhs, &[rhs]));
            }
            worst(evals)
        }
        IdentityId::Qde2f0Resummed => {
            let u = |y: Complex64| -> Result<Summed> {
                Ok(two_f_zero(q, ctx.lambda, y, t)?.scaled(theta(q, y, t)?))
            };
            let rhs = u(qv * x)?.plus(u(qv * qv * x)?.scaled(-qv * x));
            Ok(PointEval::summed(u(x)?.value, rhs))
        }
        IdentityId::QdeInfinity => {
            // z(t) = z(q^2 t) - z(qt)/(q^2 t), with t the grid point
            let z = |s| SolutionAtInfinity::new(q, s, t)?.detailed(t);
            let q2v = q2.value();
            let rhs = z(q2v * x)?.plus(z(qv * x)?.scaled(-1.0 / (q2v * x)));
            Ok(PointEval::summed(z(x)?.value, rhs))
        }
        IdentityId::ThreeWay => {
            let lhs = ramanujan_aq(q2, -q.pow(3) * x * x, t)?;
            let residues = f_via_residues(q, x, t)?;
            let r = crate::transforms::default_contour_radius(q);
            let contour = qlaplace_minus(|tau| g_borel_image(q, tau, t), q, x, r, t)?;
            worst([
                PointEval::summed(lhs, residues),
                PointEval::with_condition(lhs, contour.value, contour.condition()),
            ])
        }
        IdentityId::ResidueLemma => {
            let lambda = x;
            let mut evals = Vec::new();
            for k in 0..=5 {
                let quad = residue_by_quadrature(q, lambda, k, t)?;
                let closed = residue_closed(q, k, t)?;
                evals.push(PointEval::with_condition(quad.value, closed, 1.0));
            }
            for k in 0..=8usize {
                let direct = 1.0 / qpochhammer_inf(lambda * q.pow(-(k as i64)), q, t)?;
                let closed = qpochhammer_inf_shifted_pole(lambda, q, k, t)?;
                evals.push(PointEval::with_condition(direct, closed, 1.0));
            }
            worst(evals)
        }
        IdentityId::OperationalLemma => {
            let f = FormalSeries::ramanujan(q, OPERATIONAL_ORDER);
            let mut evals = Vec::new();
            for m in 0..=OPERATIONAL_MAX {
                for l in 0..=OPERATIONAL_MAX {
                    let (lhs, rhs) = borel_minus_operator_image(m, l, &f)?;
                    let (a, b) = (lhs.eval(x), rhs.eval(x));
                    let abs: f64 = rhs
                        .coeffs()
                        .iter()
                        .zip(0..)
                        .map(|(c, n)| (c * x.powi(n)).norm())
                        .sum();
                    evals.push(PointEval::with_condition(a, b, condition(abs, b)));
                }
            }
            worst(evals)
        }
        IdentityId::FormalInverses => {
            let p = &ctx.poly;
            let exact = p.eval(x);
            let g = qborel_minus(p);
            let gf = |tau| Ok(g.eval(tau));
            let r = best_contour_radius(gf, q, x, contour_radius_bound(q) * (1.0 - 1e-9), t);
            let minus = qlaplace_minus(gf, q, x, r, t)?;
            let phi = qborel_plus(p);
            let plus = qlaplace_plus_series(&phi, ray_lambda(ctx.lambda.norm(), x), x, t)?;
            worst([
                PointEval::with_condition(exact, minus.value, minus.condition()),
                PointEval::with_condition(exact, plus.value, plus.condition()),
            ])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_polynomial_is_deterministic() {
        let q = QModulus::real(0.5).unwrap();
        let a = test_polynomial(q, 30, 7).unwrap();
        let b = test_polynomial(q, 30, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order(), 30);
        assert_ne!(a, test_polynomial(q, 30, 8).unwrap());
    }

    #[test]
    fn worst_picks_largest_error() {
        let good = PointEval::with_condition(ONE, ONE, 1.0);
        let bad = PointEval::with_condition(ONE, Complex64::new(1.1, 0.0), 1.0);
        assert_eq!(worst([good, bad]).unwrap(), bad);
        assert!(worst(Vec::new()).is_err());
    }
}
