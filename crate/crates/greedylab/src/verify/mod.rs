//! The inequality suite: constant chains inside the symmetric-lattice
//! exactness regime, per-vector inequalities on every model, and report
//! emission.
//!
//! Constant estimates are lower bounds, so a chain `X ≤ F(Y, Z, …)` is only
//! meaningful when the right-hand estimates are exact; off symmetric lattices
//! chain checks are reported as skipped. Per-vector checks compare two
//! directly evaluated sides and run everywhere.

mod checks;
mod samples;

pub use checks::{CheckDef, CheckKind, CHECKS};

use crate::basis::BasisModel;
use crate::constants::{Estimator, TestFamily};
use crate::core::DEFAULT_TOL;
use crate::error::{invalid, Error, Result};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Carries the unmet precondition.
    Skipped(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pass => f.write_str("pass"),
            Self::Fail => f.write_str("fail"),
            Self::Skipped(reason) => write!(f, "skipped({reason})"),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Outcome of one check on one model: `lhs ≤ rhs` with `margin = rhs − lhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub space: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub status: Status,
    /// Vector literals (or a short recipe) reproducing the reported sides.
    pub witness_ref: String,
}

impl CheckResult {
    /// Passes when `lhs ≤ rhs·(1 + tol)`.
    pub fn evaluated(id: &str, space: &str, lhs: f64, rhs: f64, tol: f64, witness_ref: String) -> Self {
        let ok = lhs.is_finite() && !rhs.is_nan() && lhs <= rhs * (1.0 + tol);
        Self {
            check_id: id.into(),
            space: space.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            status: if ok { Status::Pass } else { Status::Fail },
            witness_ref,
        }
    }

    pub fn skipped(id: &str, space: &str, reason: impl Into<String>) -> Self {
        Self {
            check_id: id.into(),
            space: space.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            status: Status::Skipped(reason.into()),
            witness_ref: String::new(),
        }
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Which checks to run, how many samples per-vector checks draw, and the
/// relative tolerance of every comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Check ids from [`CHECKS`]; empty selects all.
    pub checks: Vec<String>,
    pub samples: usize,
    pub tol: f64,
}

impl Default for Selection {
    fn default() -> Self {
        Self { checks: Vec::new(), samples: 1000, tol: DEFAULT_TOL }
    }
}

impl Selection {
    /// Only the named checks; unknown ids are rejected.
    pub fn only<S: AsRef<str>>(ids: &[S]) -> Result<Self> {
        let mut checks = Vec::new();
        for id in ids {
            let id = id.as_ref().trim();
            if !CHECKS.iter().any(|c| c.id == id) {
                let known: Vec<&str> = CHECKS.iter().map(|c| c.id).collect();
                return Err(invalid(format!("unknown check `{id}`; known: {}", known.join(", "))));
            }
            checks.push(id.to_string());
        }
        Ok(Self { checks, ..Self::default() })
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn includes(&self, id: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c == id)
    }
}

/// Per-model state shared by all checks on that model.
pub(crate) struct Context<'a> {
    pub model: &'a BasisModel<f64>,
    pub label: String,
    pub family: &'a TestFamily,
    pub estimator: std::result::Result<Estimator<'a>, String>,
    pub selection: &'a Selection,
}

/// Runs the selected checks on every model, in parallel; results are ordered
/// by check id, then by the position of the model in `models`.
pub fn run_suite(models: &[BasisModel<f64>], family: &TestFamily, selection: &Selection) -> Vec<CheckResult> {
    let contexts: Vec<Context> = models
        .iter()
        .map(|model| Context {
            model,
            label: model.label(),
            family,
            estimator: Estimator::new(model, family.clone()).map_err(|e| e.to_string()),
            selection,
        })
        .collect();
    let tasks: Vec<(usize, &CheckDef)> = (0..contexts.len())
        .flat_map(|i| CHECKS.iter().filter(|c| selection.includes(c.id)).map(move |c| (i, c)))
        .collect();
    let mut results: Vec<(usize, CheckResult)> = tasks
        .par_iter()
        .flat_map_iter(|&(i, def)| checks::run(def, &contexts[i]).into_iter().map(move |r| (i, r)))
        .collect();
    results.sort_by(|a, b| a.1.check_id.cmp(&b.1.check_id).then(a.0.cmp(&b.0)));
    results.into_iter().map(|(_, r)| r).collect()
}

/// True when no result failed (skipped results do not count as failures).
pub fn all_pass(results: &[CheckResult]) -> bool {
    !results.iter().any(CheckResult::is_fail)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(invalid(format!("unknown format `{other}` (text, csv, json)"))),
        }
    }
}

pub const CSV_HEADER: [&str; 7] = ["check_id", "space", "lhs", "rhs", "margin", "status", "witness_ref"];

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

/// Serializes `results`; an empty list gives a header-only CSV.
pub fn report_emit(results: &[CheckResult], format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    report_write(results, format, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Serialize(e.to_string()))
}

/// As [`report_emit`], writing to `out`.
pub fn report_write<W: Write>(results: &[CheckResult], format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Serialize(format!("{other:?}")),
            };
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for r in results {
                w.write_record([
                    r.check_id.clone(),
                    r.space.clone(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.margin),
                    r.status.to_string(),
                    r.witness_ref.clone(),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, results).map_err(|e| Error::Serialize(e.to_string()))?;
            writeln!(out)?;
        }
        ReportFormat::Text => {
            let mut out = out;
            for r in results {
                let tag = match &r.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skipped(_) => "SKIP",
                };
                match &r.status {
                    Status::Skipped(reason) => writeln!(out, "{tag} {:<22} {:<40} {reason}", r.check_id, r.space)?,
                    _ => writeln!(
                        out,
                        "{tag} {:<22} {:<40} {:.9} <= {:.9} (margin {:.3e})",
                        r.check_id, r.space, r.lhs, r.rhs, r.margin
                    )?,
                }
            }
            let fails = results.iter().filter(|r| r.is_fail()).count();
            let skips = results.iter().filter(|r| matches!(r.status, Status::Skipped(_))).count();
            writeln!(out, "{} checks: {} pass, {fails} fail, {skips} skipped", results.len(), results.len() - fails - skips)?;
        }
    }
    Ok(())
}
