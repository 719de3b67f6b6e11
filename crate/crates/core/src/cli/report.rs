//! Result tables, comparison rows and their on-disk form.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::config::{Scenario, ToleranceConfig, Truncation};
use crate::dynamics::SystemParams;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Denominator floor of the relative deviation.
pub const REL_FLOOR: f64 = 1e-300;

/// An analytic value set against a numerical one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub analytic: f64,
    pub numeric: f64,
    /// `|analytic - numeric| / max(|analytic|, REL_FLOOR)`
    pub rel_dev: f64,
    /// `None` for rows that are reported but not checked.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl ComparisonRow {
    pub fn new(quantity: impl Into<String>, analytic: f64, numeric: f64, tolerance: Option<f64>) -> Self {
        let rel_dev = (analytic - numeric).abs() / analytic.abs().max(REL_FLOOR);
        let pass = tolerance.is_none_or(|t| rel_dev <= t);
        Self { quantity: quantity.into(), analytic, numeric, rel_dev, tolerance, pass }
    }

    /// A row compared in absolute rather than relative terms.
    pub fn absolute(quantity: impl Into<String>, analytic: f64, numeric: f64, tolerance: f64) -> Self {
        let mut row = Self::new(quantity, analytic, numeric, None);
        row.pass = (analytic - numeric).abs() <= tolerance;
        row.tolerance = Some(tolerance);
        row
    }

    /// A pass/fail condition without a numerical counterpart; recorded as
    /// `analytic = 1`, `numeric = 1` or `0`.
    pub fn check(quantity: impl Into<String>, holds: bool) -> Self {
        Self::new(quantity, 1.0, if holds { 1.0 } else { 0.0 }, Some(0.0))
    }
}

/// A numeric table written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// 17 significant digits, `.` decimal separator, `\n` line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    schema_version: u32,
    scenario: &'a str,
    task: &'a str,
    columns: &'a [String],
    params: &'a SystemParams,
    sweep_param: &'a str,
    truncation: &'a Truncation,
    tolerances: &'a ToleranceConfig,
    rows: &'a [ComparisonRow],
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    scenario: &'a str,
    pass: bool,
    rows: &'a [ComparisonRow],
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes `<name>_<task>.csv` and its JSON sidecar.
pub fn write_task(dir: &Path, scenario: &Scenario, task: &str, table: &Table, rows: &[ComparisonRow]) -> Result<()> {
    let stem = format!("{}_{task}", scenario.name);
    write(&dir.join(format!("{stem}.csv")), &table.to_csv())?;
    let meta = Sidecar {
        schema_version: SCHEMA_VERSION,
        scenario: &scenario.name,
        task,
        columns: &table.columns,
        params: &scenario.params,
        sweep_param: scenario.sweep_param(),
        truncation: &scenario.truncation,
        tolerances: &scenario.tolerances,
        rows,
    };
    write(&dir.join(format!("{stem}.json")), &to_json(&meta))
}

/// Writes `<name>_summary.json` and returns the formatted table.
pub fn write_summary(dir: &Path, scenario: &Scenario, rows: &[ComparisonRow]) -> Result<String> {
    let summary = Summary { schema_version: SCHEMA_VERSION, scenario: &scenario.name, pass: all_pass(rows), rows };
    write(&dir.join(format!("{}_summary.json", scenario.name)), &to_json(&summary))?;
    Ok(report(rows))
}

pub fn all_pass(rows: &[ComparisonRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

/// Fixed-column text table of comparison rows.
pub fn report(rows: &[ComparisonRow]) -> String {
    let width = rows.iter().map(|r| r.quantity.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>24}  {:>24}  {:>10}  {:>9}  result", "quantity", "analytic", "numeric", "rel_dev", "tol");
    for r in rows {
        let tol = r.tolerance.map_or("-".to_string(), |t| format!("{t:.1e}"));
        let verdict = match (r.tolerance, r.pass) {
            (None, _) => "info",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>24.16e}  {:>24.16e}  {:>10.3e}  {:>9}  {verdict}",
            r.quantity, r.analytic, r.numeric, r.rel_dev, tol
        );
    }
    let _ = writeln!(out, "overall: {}", if all_pass(rows) { "PASS" } else { "FAIL" });
    out
}
