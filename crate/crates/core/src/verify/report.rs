use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qcore::Truncation;

/// Complex number as a `{"re": .., "im": ..}` object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for Complex64 {
    fn from(z: JsonComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// One grid point. Skipped points carry a reason and no values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: JsonComplex,
    pub lhs: Option<JsonComplex>,
    pub rhs: Option<JsonComplex>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub condition: Option<f64>,
    pub skipped: bool,
    pub reason: Option<String>,
}

impl PointRecord {
    pub fn skipped(x: Complex64, reason: impl Into<String>) -> Self {
        Self {
            x: x.into(),
            lhs: None,
            rhs: None,
            abs_err: None,
            rel_err: None,
            condition: None,
            skipped: true,
            reason: Some(reason.into()),
        }
    }

    /// Tolerance actually applied at this point: `tol`, widened to `tol * condition`
    /// once the condition estimate exceeds `1e3`.
    pub fn effective_tol(&self, tol: f64) -> f64 {
        match self.condition {
            Some(c) if c > super::CONDITION_WIDENING => tol * c,
            _ => tol,
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.rel_err.is_some_and(|e| e <= self.effective_tol(tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncSummary {
    pub eps: f64,
    pub n_max: usize,
}

impl From<&Truncation> for TruncSummary {
    fn from(t: &Truncation) -> Self {
        Self {
            eps: t.eps,
            n_max: t.n_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub q: JsonComplex,
    pub lambda: Option<JsonComplex>,
    pub points: Vec<PointRecord>,
    pub max_rel_err: Option<f64>,
    pub pass: bool,
    pub trunc: TruncSummary,
}

impl IdentityReport {
    pub fn evaluated(&self) -> usize {
        self.points.iter().filter(|p| !p.skipped).count()
    }

    pub fn skipped(&self) -> usize {
        self.points.len() - self.evaluated()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self).map_err(io_err)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(io_err)
    }

    /// One CSV row per point, columns mirroring [`PointRecord`].
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for p in &self.points {
            out.serialize(CsvRow::from(p)).map_err(io_err)?;
        }
        out.flush()
            .map_err(|e| crate::error::QError::InvalidParameter(e.to_string()))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(io_err)
    }

    pub fn summary_line(&self) -> String {
        let err = self
            .max_rel_err
            .map_or_else(|| "n/a".to_string(), |e| format!("{e:.3e}"));
        if self.pass {
            format!("PASS max_rel_err={err}")
        } else {
            format!(
                "FAIL {} max_rel_err={err} evaluated={} skipped={}",
                self.identity,
                self.evaluated(),
                self.skipped()
            )
        }
    }
}

fn io_err<E: std::fmt::Display>(e: E) -> crate::error::QError {
    crate::error::QError::InvalidParameter(e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    x_re: f64,
    x_im: f64,
    lhs_re: Option<f64>,
    lhs_im: Option<f64>,
    rhs_re: Option<f64>,
    rhs_im: Option<f64>,
    abs_err: Option<f64>,
    rel_err: Option<f64>,
    condition: Option<f64>,
    skipped: bool,
    reason: Option<String>,
}

impl From<&PointRecord> for CsvRow {
    fn from(p: &PointRecord) -> Self {
        Self {
            x_re: p.x.re,
            x_im: p.x.im,
            lhs_re: p.lhs.map(|z| z.re),
            lhs_im: p.lhs.map(|z| z.im),
            rhs_re: p.rhs.map(|z| z.re),
            rhs_im: p.rhs.map(|z| z.im),
            abs_err: p.abs_err,
            rel_err: p.rel_err,
            condition: p.condition,
            skipped: p.skipped,
            reason: p.reason.clone(),
        }
    }
}
