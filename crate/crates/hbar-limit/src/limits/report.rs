use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, Polarity};
use crate::{Error, Result};

/// One measurement at one hbar. Rows of auxiliary tables that are not tied to
/// a quantum run carry hbar = 0 and dim = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub hbar: f64,
    pub dim: usize,
    pub metric: String,
    pub value: f64,
    pub reference: Option<f64>,
    pub defect: f64,
    /// Row enters the rate fit.
    pub rate_flag: bool,
}

impl ReportRow {
    pub fn new(hbar: f64, dim: usize, metric: &str, value: f64, reference: Option<f64>, defect: f64) -> Self {
        Self { hbar, dim, metric: metric.into(), value, reference, defect, rate_flag: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// `passed` means every assertion held; for a negative kind the assertions are
/// the non-convergence statements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub polarity: Polarity,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    /// Metric the rate is fitted on.
    pub primary_metric: String,
    pub rows: Vec<ReportRow>,
    pub rate: Option<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    pub fn rows_for<'a>(&'a self, metric: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.verdict.checks.iter().find(|c| c.name == name)
    }
}

/// Least-squares slope of ln(value) against ln(hbar) over the flagged rows.
pub fn fit_rate(rows: &[ReportRow]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.rate_flag && r.value > 0.0 && r.hbar > 0.0)
        .map(|r| (r.hbar.ln(), r.value.ln()))
        .collect();
    least_squares_slope(&pts)
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Result<f64> {
    if pts.len() < 3 {
        return Err(Error::InvalidParameter { key: "rows".into(), reason: format!("rate fit needs 3 valid rows, got {}", pts.len()) });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter { key: "rows".into(), reason: "all rows share one hbar".into() });
    }
    Ok(sxy / sxx)
}
