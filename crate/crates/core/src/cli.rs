//! Parsing, formatting and evaluation helpers behind the `qconnect` binary.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::qcore::{
    big_e_exp_detailed, e_exp_detailed, e_exp_product, rphis_detailed, theta_detailed, QModulus,
    Spiral, Truncation, DEFAULT_DELTA,
};
use crate::special::{
    f_via_residues, g_borel_image, qairy_ai_detailed, ramanujan_aq_detailed, two_f_zero,
    two_f_zero_closed_parts,
};

/// Environment variable overriding the default tail tolerance.
pub const TRUNC_EPS_ENV: &str = "Q_CONNECT_TRUNC_EPS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

const GRAMMAR: &str = "expected a complex literal of the form a, a+bi or a-bi (no spaces), e.g. 0.5, 1.2-0.3i, -2e-3+4i";

/// Parses `a`, `a+bi`, `a-bi`, `bi` (real parts and magnitudes in any float syntax).
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let err = || format!("invalid complex literal '{s}': {GRAMMAR}");
    let s = s.trim();
    if s.is_empty() || s.contains(char::is_whitespace) {
        return Err(err());
    }
    let Some(body) = s.strip_suffix('i') else {
        return f64::from_str(s)
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| err());
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> std::result::Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => f64::from_str(t).map_err(|_| err()),
        }
    };
    match split {
        Some(k) => {
            let re = f64::from_str(&body[..k]).map_err(|_| err())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Comma-separated list of complex literals.
pub fn parse_complex_list(s: &str) -> std::result::Result<Vec<Complex64>, String> {
    s.split(',').map(parse_complex).collect()
}

/// `re+im i` with 15 significant digits in each part.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.14e}{sign}{:.14e}i", z.re, z.im.abs())
}

/// Default truncation, with `eps` taken from [`TRUNC_EPS_ENV`] when set.
pub fn truncation_from_env() -> Result<Truncation> {
    truncation_with_eps(std::env::var(TRUNC_EPS_ENV).ok().as_deref())
}

pub fn truncation_with_eps(eps: Option<&str>) -> Result<Truncation> {
    match eps {
        None => Ok(Truncation::default()),
        Some(s) => {
            let eps = f64::from_str(s.trim()).map_err(|_| {
                QError::InvalidTruncation(format!("{TRUNC_EPS_ENV}='{s}' is not a number"))
            })?;
            Truncation::default().with_eps(eps)
        }
    }
}

/// Functions reachable from `qconnect eval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalFunction {
    Aq,
    Aiq,
    Theta,
    SmallEq,
    BigEq,
    Rphis,
    TwoF0,
    TwoF0Closed,
    FResidues,
    GBorel,
}

impl EvalFunction {
    pub const ALL: [EvalFunction; 10] = [
        EvalFunction::Aq,
        EvalFunction::Aiq,
        EvalFunction::Theta,
        EvalFunction::SmallEq,
        EvalFunction::BigEq,
        EvalFunction::Rphis,
        EvalFunction::TwoF0,
        EvalFunction::TwoF0Closed,
        EvalFunction::FResidues,
        EvalFunction::GBorel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EvalFunction::Aq => "Aq",
            EvalFunction::Aiq => "Aiq",
            EvalFunction::Theta => "theta",
            EvalFunction::SmallEq => "eq",
            EvalFunction::BigEq => "Eq",
            EvalFunction::Rphis => "rphis",
            EvalFunction::TwoF0 => "2f0",
            EvalFunction::TwoF0Closed => "2f0-closed",
            EvalFunction::FResidues => "f-residues",
            EvalFunction::GBorel => "g-borel",
        }
    }
}

impl fmt::Display for EvalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EvalFunction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        EvalFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = EvalFunction::ALL.iter().map(|f| f.name()).collect();
                format!(
                    "unknown function '{s}'; expected one of {}",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalParams {
    pub lambda: Option<Complex64>,
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// Terms or factors used, when the evaluator counts them.
    pub terms: Option<usize>,
    pub warnings: Vec<String>,
}

impl Evaluation {
    fn counted(value: Complex64, terms: usize) -> Self {
        Self {
            value,
            terms: Some(terms),
            warnings: Vec::new(),
        }
    }
}

fn require_lambda(p: &EvalParams) -> Result<Complex64> {
    p.lambda
        .ok_or_else(|| QError::InvalidParameter("this function needs --lambda".into()))
}

pub fn evaluate(
    f: EvalFunction,
    q: QModulus,
    x: Complex64,
    p: &EvalParams,
    t: &Truncation,
) -> Result<Evaluation> {
    let s = match f {
        EvalFunction::Aq => ramanujan_aq_detailed(q, x, t)?,
        EvalFunction::Aiq => qairy_ai_detailed(q, x, t)?,
        EvalFunction::Theta => {
            let mut e = theta_detailed(q, x, t).map(|s| Evaluation::counted(s.value, s.terms))?;
            let zeros = Spiral::new(Complex64::new(-1.0, 0.0), q, DEFAULT_DELTA)?;
            if let Some(n) = zeros.nearest(x).filter(|n| n.distance <= zeros.delta()) {
                e.warnings.push(format!(
                    "x lies on the zero spiral {zeros} of theta (index {}, relative distance {:.2e})",
                    n.index, n.distance
                ));
            }
            return Ok(e);
        }
        EvalFunction::SmallEq => {
            if x.norm() < 1.0 {
                e_exp_detailed(q, x, t)?
            } else {
                return Ok(Evaluation {
                    value: e_exp_product(q, x, t)?,
                    terms: None,
                    warnings: vec!["|x| >= 1: evaluated as 1/(x;q)_inf".into()],
                });
            }
        }
        EvalFunction::BigEq => big_e_exp_detailed(q, x, t)?,
        EvalFunction::Rphis => rphis_detailed(&p.upper, &p.lower, q, x, t)?,
        EvalFunction::TwoF0 => two_f_zero(q, require_lambda(p)?, x, t)?,
        EvalFunction::TwoF0Closed => {
            let v = two_f_zero_closed_parts(q, require_lambda(p)?, x, t)?.value();
            return Ok(Evaluation {
                value: v,
                terms: None,
                warnings: Vec::new(),
            });
        }
        EvalFunction::FResidues => f_via_residues(q, x, t)?,
        EvalFunction::GBorel => {
            return Ok(Evaluation {
                value: g_borel_image(q, x, t)?,
                terms: None,
                warnings: Vec::new(),
            })
        }
    };
    Ok(Evaluation::counted(s.value, s.terms))
}

/// Exit code for an error raised while evaluating or checking.
pub fn exit_code(e: &QError) -> i32 {
    if e.is_domain_exclusion() {
        EXIT_DOMAIN
    } else {
        match e {
            QError::InvalidModulus(_)
            | QError::InvalidTruncation(_)
            | QError::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5"), Ok(c(0.5, 0.0)));
        assert_eq!(parse_complex("-2"), Ok(c(-2.0, 0.0)));
        assert_eq!(parse_complex("1.2-0.3i"), Ok(c(1.2, -0.3)));
        assert_eq!(parse_complex("-1+4i"), Ok(c(-1.0, 4.0)));
        assert_eq!(parse_complex("1e-3+2e-2i"), Ok(c(1e-3, 2e-2)));
        assert_eq!(parse_complex("-2.5e+1-1E-1i"), Ok(c(-25.0, -0.1)));
        assert_eq!(parse_complex("3i"), Ok(c(0.0, 3.0)));
        assert_eq!(parse_complex("-i"), Ok(c(0.0, -1.0)));
        assert_eq!(parse_complex("1+i"), Ok(c(1.0, 1.0)));
        for bad in ["", "1 + 2i", "abc", "1+2j", "1++2i", "i2"] {
            let e = parse_complex(bad).unwrap_err();
            assert!(e.contains("a+bi"), "{bad}: {e}");
        }
        assert_eq!(
            parse_complex_list("1,2-i").unwrap(),
            vec![c(1.0, 0.0), c(2.0, -1.0)]
        );
    }

    #[test]
    fn formatting() {
        assert_eq!(
            format_complex(c(1.0, 0.0)),
            "1.00000000000000e0+0.00000000000000e0i"
        );
        assert_eq!(
            format_complex(c(-0.25, -3.0)),
            "-2.50000000000000e-1-3.00000000000000e0i"
        );
        let z = c(0.123_456_789_012_345_68, 1.0 / 3.0);
        assert_eq!(
            parse_complex(&format_complex(z)).unwrap().re,
            1.23456789012346e-1
        );
    }

    #[test]
    fn eps_override() {
        assert_eq!(truncation_with_eps(None).unwrap(), Truncation::default());
        assert_eq!(truncation_with_eps(Some("1e-12")).unwrap().eps, 1e-12);
        assert!(truncation_with_eps(Some("tiny")).is_err());
        assert!(truncation_with_eps(Some("-1")).is_err());
    }

    #[test]
    fn function_names() {
        for f in EvalFunction::ALL {
            assert_eq!(f.name().parse::<EvalFunction>().unwrap(), f);
        }
        assert_ne!("eq".parse::<EvalFunction>(), "Eq".parse::<EvalFunction>());
    }

    #[test]
    fn evaluations() {
        let q = QModulus::real(0.5).unwrap();
        let t = Truncation::default();
        let p = EvalParams::default();
        assert_eq!(
            evaluate(EvalFunction::Aq, q, c(0.0, 0.0), &p, &t)
                .unwrap()
                .value,
            c(1.0, 0.0)
        );
        let th = evaluate(EvalFunction::Theta, q, c(-0.5, 0.0), &p, &t).unwrap();
        assert!(th.value.norm() < 1e-15 && !th.warnings.is_empty());
        let lam = EvalParams {
            lambda: Some(c(0.7, 0.0)),
            ..Default::default()
        };
        let a = evaluate(EvalFunction::TwoF0, q, c(2.4, 0.0), &lam, &t)
            .unwrap()
            .value;
        let b = evaluate(EvalFunction::TwoF0Closed, q, c(2.4, 0.0), &lam, &t)
            .unwrap()
            .value;
        assert!((a - b).norm() < 1e-11 * b.norm());
        let e = evaluate(EvalFunction::TwoF0, q, c(-0.7, 0.0), &lam, &t).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_DOMAIN);
        assert_eq!(
            exit_code(&evaluate(EvalFunction::TwoF0, q, c(2.0, 0.0), &p, &t).unwrap_err()),
            EXIT_USAGE
        );
    }
}
