//! Connection formulae and q-difference equations as numerical checks over complex grids.
//!
//! Every check evaluates a left and a right side along separate code paths at each
//! grid point and records the relative error together with a condition estimate
//! of the right side.

mod identities;
mod report;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QError, Result};
use crate::qcore::{QModulus, Truncation};

pub use identities::{
    rel_err, test_polynomial, PointEval, DEFAULT_ABC, DEFAULT_LAMBDA, OPERATIONAL_MAX,
    OPERATIONAL_ORDER, POLY_SEED, ROUND_TRIP_LAMBDA,
};
pub use report::{IdentityReport, JsonComplex, PointRecord, TruncSummary};

/// Condition estimate above which the tolerance scales with it.
pub const CONDITION_WIDENING: f64 = 1e3;
/// Points where both sides fall below this are skipped as degenerate.
pub const DEGENERATE: f64 = 1e-250;

pub const DEFAULT_GRID_POINTS: usize = 24;
pub const DEFAULT_GRID_MODULI: (f64, f64) = (0.15, 8.0);
pub const DEFAULT_GRID_ANGLES: usize = 8;
/// Degree of the polynomial driven through the analytic round trips.
pub const DEFAULT_POLY_DEGREE: usize = 10;
pub const SUITE_BASES: [f64; 3] = [0.3, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Watson,
    IsmailZhang,
    ThmRamanujanQairy,
    ThmEqEq,
    LemmaAlt,
    Thm2f0,
    QdeRamanujan,
    QdeQairy,
    QdeTheta,
    Qde2f0Resummed,
    QdeInfinity,
    ThreeWay,
    ResidueLemma,
    OperationalLemma,
    FormalInverses,
}

impl IdentityId {
    pub const ALL: [IdentityId; 15] = [
        IdentityId::Watson,
        IdentityId::IsmailZhang,
        IdentityId::ThmRamanujanQairy,
        IdentityId::ThmEqEq,
        IdentityId::LemmaAlt,
        IdentityId::Thm2f0,
        IdentityId::QdeRamanujan,
        IdentityId::QdeQairy,
        IdentityId::QdeTheta,
        IdentityId::Qde2f0Resummed,
        IdentityId::QdeInfinity,
        IdentityId::ThreeWay,
        IdentityId::ResidueLemma,
        IdentityId::OperationalLemma,
        IdentityId::FormalInverses,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Watson => "watson",
            IdentityId::IsmailZhang => "ismail-zhang",
            IdentityId::ThmRamanujanQairy => "thm-ramanujan-qairy",
            IdentityId::ThmEqEq => "thm-eq-Eq",
            IdentityId::LemmaAlt => "lemma-alt",
            IdentityId::Thm2f0 => "thm-2f0",
            IdentityId::QdeRamanujan => "qde-ramanujan",
            IdentityId::QdeQairy => "qde-qairy",
            IdentityId::QdeTheta => "qde-theta",
            IdentityId::Qde2f0Resummed => "qde-2f0-resummed",
            IdentityId::QdeInfinity => "qde-infinity",
            IdentityId::ThreeWay => "three-way",
            IdentityId::ResidueLemma => "residue-lemma",
            IdentityId::OperationalLemma => "operational-lemma",
            IdentityId::FormalInverses => "formal-inverses",
        }
    }

    /// Tolerance used when a check does not set one.
    pub fn default_tol(self) -> f64 {
        match self {
            IdentityId::ThmEqEq | IdentityId::LemmaAlt => 1e-12,
            IdentityId::IsmailZhang => 1e-10,
            IdentityId::Thm2f0 | IdentityId::ResidueLemma => 1e-8,
            IdentityId::OperationalLemma => 1e-13,
            _ => 1e-9,
        }
    }

    pub fn uses_lambda(self) -> bool {
        matches!(
            self,
            IdentityId::Thm2f0 | IdentityId::Qde2f0Resummed | IdentityId::FormalInverses
        )
    }

    pub(crate) fn needs_nonzero_point(self) -> bool {
        !matches!(
            self,
            IdentityId::QdeRamanujan | IdentityId::QdeQairy | IdentityId::OperationalLemma
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = IdentityId::ALL.iter().map(|id| id.name()).collect();
                QError::InvalidParameter(format!(
                    "unknown identity '{s}'; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Deliberate corruptions used to confirm that the harness notices wrong formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Drops the `1/(1-q)` factor from the closed form of the resummed `2phi0`.
    DropOneMinusQ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub id: IdentityId,
    pub q: QModulus,
    /// Spiral base of the resummation. `formal-inverses` keeps only its modulus and
    /// sums along the ray through each grid point.
    pub lambda: Option<Complex64>,
    pub abc: Option<[Complex64; 3]>,
    pub grid: Vec<Complex64>,
    pub tol: f64,
    pub trunc: Truncation,
    pub mutation: Option<Mutation>,
    pub poly_degree: usize,
}

impl IdentityCheck {
    /// Check on the default grid with the identity's default tolerance.
    pub fn new(id: IdentityId, q: QModulus) -> Self {
        Self {
            id,
            q,
            lambda: None,
            abc: None,
            grid: default_grid(),
            tol: id.default_tol(),
            trunc: Truncation::default(),
            mutation: None,
            poly_degree: DEFAULT_POLY_DEGREE,
        }
    }

    pub fn with_lambda(mut self, lambda: Complex64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_abc(mut self, abc: [Complex64; 3]) -> Self {
        self.abc = Some(abc);
        self
    }

    pub fn with_grid(mut self, grid: Vec<Complex64>) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_trunc(mut self, trunc: Truncation) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = Some(mutation);
        self
    }

    pub fn with_poly_degree(mut self, degree: usize) -> Self {
        self.poly_degree = degree;
        self
    }

    /// The spiral base reported for this check, if the identity depends on one.
    pub fn effective_lambda(&self) -> Option<Complex64> {
        if !self.id.uses_lambda() {
            return self.lambda;
        }
        Some(self.lambda.unwrap_or(match self.id {
            IdentityId::FormalInverses => ROUND_TRIP_LAMBDA,
            _ => DEFAULT_LAMBDA,
        }))
    }
}

/// 24 points with log-spaced moduli in `[0.15, 8]`, cycling through 8 angles
/// `pi/16 + k pi/4`, which keeps every point `pi/16` away from the real axis.
pub fn default_grid() -> Vec<Complex64> {
    let (lo, hi) = DEFAULT_GRID_MODULI;
    let n = DEFAULT_GRID_POINTS;
    (0..n)
        .map(|j| {
            let r = lo * (hi / lo).powf(j as f64 / (n - 1) as f64);
            let arg = PI / 16.0
                + 2.0 * PI * (j % DEFAULT_GRID_ANGLES) as f64 / DEFAULT_GRID_ANGLES as f64;
            Complex64::from_polar(r, arg)
        })
        .collect()
}

/// `count` points on `|x| = r` starting at angle `offset`.
pub fn circle_grid(r: f64, count: usize, offset: f64) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(r, offset + 2.0 * PI * j as f64 / count as f64))
        .collect()
}

fn record(x: Complex64, outcome: Result<PointEval>, tol: f64) -> PointRecord {
    let eval = match outcome {
        Ok(e) => e,
        Err(e) => return PointRecord::skipped(x, e.to_string()),
    };
    let (lhs, rhs) = (eval.lhs, eval.rhs);
    if !(lhs.is_finite() && rhs.is_finite() && eval.condition.is_finite()) {
        return PointRecord::skipped(x, "non-finite value");
    }
    if lhs.norm() < DEGENERATE && rhs.norm() < DEGENERATE {
        return PointRecord::skipped(x, "both sides below 1e-250");
    }
    // Relative errors never exceed 2, so once tol * condition reaches 1 the widened
    // test accepts anything. The condition is referred to the smaller side so that a
    // wildly wrong right side cannot shrink it.
    let reference = eval.condition * rhs.norm() / lhs.norm().min(rhs.norm()).max(1e-300);
    let condition = eval.condition.max(reference);
    if condition * tol >= 1.0 {
        return PointRecord::skipped(
            x,
            format!("condition {condition:.1e} too large to test at tolerance {tol:.0e}"),
        );
    }
    PointRecord {
        x: x.into(),
        lhs: Some(lhs.into()),
        rhs: Some(rhs.into()),
        abs_err: Some((lhs - rhs).norm()),
        rel_err: Some(eval.rel_err()),
        condition: Some(eval.condition),
        skipped: false,
        reason: None,
    }
}

/// Runs one identity check over its grid, evaluating points in parallel.
///
/// Fails with a domain error when the parameters themselves are excluded, and with
/// [`QError::EmptyGrid`] when every grid point is.
pub fn check(spec: &IdentityCheck) -> Result<IdentityReport> {
    if spec.tol.is_nan() || spec.tol <= 0.0 {
        return Err(QError::InvalidParameter(format!(
            "tolerance {} must be positive",
            spec.tol
        )));
    }
    let ctx = identities::Context::new(spec)?;
    identities::validate(spec.id, &ctx)?;

    let mut excluded = Vec::with_capacity(spec.grid.len());
    for &x in &spec.grid {
        excluded.push(identities::exclusion(spec.id, &ctx, x)?);
    }
    if excluded.iter().all(Option::is_some) {
        return Err(QError::EmptyGrid);
    }

    let points: Vec<PointRecord> = spec
        .grid
        .par_iter()
        .zip(excluded.par_iter())
        .map(|(&x, why)| match why {
            Some(reason) => PointRecord::skipped(x, reason.clone()),
            None => record(x, identities::evaluate(spec.id, &ctx, x), spec.tol),
        })
        .collect();

    Ok(assemble(spec, points))
}

fn assemble(spec: &IdentityCheck, points: Vec<PointRecord>) -> IdentityReport {
    let evaluated: Vec<&PointRecord> = points.iter().filter(|p| !p.skipped).collect();
    let max_rel_err = evaluated
        .iter()
        .filter_map(|p| p.rel_err)
        .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    let pass = !evaluated.is_empty() && evaluated.iter().all(|p| p.within(spec.tol));
    IdentityReport {
        identity: spec.id.name().to_string(),
        q: spec.q.value().into(),
        lambda: spec.effective_lambda().map(Into::into),
        points,
        max_rel_err,
        pass,
        trunc: (&spec.trunc).into(),
    }
}

/// Report for a check whose parameters were rejected: every point skipped, failing.
pub fn rejected_report(spec: &IdentityCheck, err: &QError) -> IdentityReport {
    let points = spec
        .grid
        .iter()
        .map(|&x| PointRecord::skipped(x, err.to_string()))
        .collect();
    assemble(spec, points)
}

/// Runs every check; rejected checks come back as failing reports. Order follows the input.
pub fn run_suite(config: &[IdentityCheck]) -> Vec<IdentityReport> {
    config
        .par_iter()
        .map(|spec| check(spec).unwrap_or_else(|e| rejected_report(spec, &e)))
        .collect()
}

/// Every identity at each base in [`SUITE_BASES`] on the default grid.
pub fn default_suite() -> Vec<IdentityCheck> {
    SUITE_BASES
        .iter()
        .flat_map(|&q| {
            let q = QModulus::real(q).expect("suite bases lie in (0, 1)");
            IdentityId::ALL
                .into_iter()
                .map(move |id| IdentityCheck::new(id, q))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q5() -> QModulus {
        QModulus::real(0.5).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert!("thm-eq-eq".parse::<IdentityId>().is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 24);
        assert!((g[0].norm() - 0.15).abs() < 1e-15);
        assert!((g[23].norm() - 8.0).abs() < 1e-12);
        for x in &g {
            let a = x.arg().abs();
            assert!((PI / 16.0 - 1e-12..=PI - PI / 16.0 + 1e-12).contains(&a));
        }
        assert!(g.iter().any(|x| x.norm() < 1.0) && g.iter().any(|x| x.norm() > 1.0));
    }

    #[test]
    fn spec_examples() {
        let one = |id, x, tol| {
            let r = check(
                &IdentityCheck::new(id, q5())
                    .with_grid(vec![x])
                    .with_tol(tol),
            )
            .unwrap();
            assert!(r.pass, "{id}: {:?}", r.points[0]);
        };
        one(IdentityId::ThmRamanujanQairy, c(1.0, 0.0), 1e-10);
        one(IdentityId::ThmEqEq, c(0.4, 0.0), 1e-12);
        one(IdentityId::Watson, c(0.8, 0.0), 1e-9);
    }

    #[test]
    fn excluded_points_are_skipped() {
        let spec = IdentityCheck::new(IdentityId::ThmEqEq, q5())
            .with_grid(vec![c(0.25, 0.0), c(0.4, 0.1)]);
        let r = check(&spec).unwrap();
        assert!(r.points[0].skipped && !r.points[1].skipped);
        assert!(r.points[0].reason.as_deref().unwrap().contains("spiral"));
        let all = IdentityCheck::new(IdentityId::ThmEqEq, q5()).with_grid(vec![c(0.25, 0.0)]);
        assert_eq!(check(&all), Err(QError::EmptyGrid));
    }

    #[test]
    fn lambda_on_q_powers_is_rejected() {
        let spec = IdentityCheck::new(IdentityId::Thm2f0, q5()).with_lambda(c(1.0, 0.0));
        let err = check(&spec).unwrap_err();
        assert!(err.is_domain_exclusion());
        let rep = &run_suite(&[spec])[0];
        assert!(!rep.pass && rep.points.iter().all(|p| p.skipped));
    }

    #[test]
    fn empty_suite() {
        assert!(run_suite(&[]).is_empty());
    }

    #[test]
    fn mutation_is_detected() {
        let base =
            IdentityCheck::new(IdentityId::Thm2f0, q5()).with_grid(vec![c(2.4, 0.0), c(-1.0, 2.0)]);
        assert!(check(&base).unwrap().pass);
        let bad = check(&base.with_mutation(Mutation::DropOneMinusQ)).unwrap();
        assert!(!bad.pass && bad.max_rel_err.unwrap() > 1e-3);
    }

    #[test]
    fn hopeless_points_are_skipped_not_passed() {
        // L^- of a degree-30 polynomial at q = 0.3 carries no correct digit
        let spec = IdentityCheck::new(IdentityId::FormalInverses, QModulus::real(0.3).unwrap())
            .with_poly_degree(30)
            .with_grid(vec![c(0.33, -1.66)]);
        let r = check(&spec).unwrap();
        assert!(!r.pass && r.points[0].skipped);
        assert!(r.points[0].reason.as_deref().unwrap().contains("condition"));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let spec = IdentityCheck::new(IdentityId::LemmaAlt, q5());
        let json = check(&spec).unwrap().to_json().unwrap();
        let back = IdentityReport::from_json(&json).unwrap();
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let spec = IdentityCheck::new(IdentityId::QdeTheta, q5());
        let csv = check(&spec).unwrap().to_csv().unwrap();
        assert_eq!(csv.lines().count(), 1 + 24);
        assert!(csv.starts_with(
            "x_re,x_im,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,condition,skipped,reason"
        ));
    }
}
