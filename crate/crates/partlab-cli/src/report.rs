//! Result records and their CSV and JSON renderings.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! runs give equal bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const CSV_HEADER_COMMENT: &str = "# partlab results v1";
pub const CSV_COLUMNS: [&str; 13] = [
    "scenario",
    "method",
    "k",
    "partition",
    "N",
    "t",
    "estimate",
    "stderr",
    "prediction",
    "abs_error",
    "tolerance",
    "pass",
    "note",
];

/// How `|estimate − prediction|` is judged against the standard error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    /// `max(sigmas·stderr, floor)`.
    Max,
    /// `sigmas·stderr + floor`.
    Sum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    pub sigmas: f64,
    pub floor: f64,
    pub combine: Combine,
}

impl Tolerance {
    pub fn max(sigmas: f64, floor: f64) -> Self {
        Tolerance { sigmas, floor, combine: Combine::Max }
    }

    pub fn sum(sigmas: f64, floor: f64) -> Self {
        Tolerance { sigmas, floor, combine: Combine::Sum }
    }

    /// Exact comparisons: zero tolerance.
    pub fn exact() -> Self {
        Tolerance::max(0.0, 0.0)
    }

    pub fn bound(&self, stderr: f64) -> f64 {
        let s = if stderr.is_finite() { self.sigmas * stderr } else { 0.0 };
        match self.combine {
            Combine::Max => s.max(self.floor),
            Combine::Sum => s + self.floor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRecord {
    pub scenario: String,
    /// `exact`, `mc`, `ode` or a scenario-specific statistic name.
    pub method: String,
    pub k: usize,
    /// Canonical text of the partition the value refers to.
    pub partition: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: Option<f64>,
    pub estimate: f64,
    pub stderr: f64,
    pub prediction: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

/// Builder fields that are not derived from the comparison.
#[derive(Clone, Debug, Default)]
pub struct Key {
    pub method: String,
    pub k: usize,
    pub partition: String,
    pub n: usize,
    pub t: Option<f64>,
    pub note: String,
}

impl Key {
    pub fn new(method: &str, k: usize, partition: impl ToString, n: usize) -> Self {
        Key { method: method.into(), k, partition: partition.to_string(), n, ..Key::default() }
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

impl ResultRecord {
    /// `pass ⇔ |estimate − prediction| ≤ tolerance.bound(stderr)`.
    pub fn judge(scenario: &str, key: Key, estimate: f64, stderr: f64, prediction: f64, tol: &Tolerance) -> Self {
        let abs_error = (estimate - prediction).abs();
        let bound = tol.bound(stderr);
        ResultRecord {
            scenario: scenario.into(),
            method: key.method,
            k: key.k,
            partition: key.partition,
            n: key.n,
            t: key.t,
            estimate,
            stderr,
            prediction,
            abs_error,
            tolerance: bound,
            pass: abs_error <= bound,
            note: key.note,
        }
    }
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER_COMMENT);
    out.push('\n');
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.method,
            r.k,
            quoted(&r.partition),
            r.n,
            r.t.map(num).unwrap_or_default(),
            num(r.estimate),
            num(r.stderr),
            num(r.prediction),
            num(r.abs_error),
            num(r.tolerance),
            r.pass,
            quoted(&r.note),
        );
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub format: &'static str,
    pub scenario: String,
    pub seed: Option<u64>,
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
    /// The failing record with the largest `abs_error − tolerance`, if any.
    pub worst_failure: Option<ResultRecord>,
    pub results: Vec<ResultRecord>,
}

impl Summary {
    pub fn new(scenario: &str, seed: Option<u64>, results: Vec<ResultRecord>) -> Self {
        let passed = results.iter().filter(|r| r.pass).count();
        let worst_failure = results
            .iter()
            .filter(|r| !r.pass)
            .max_by(|a, b| (a.abs_error - a.tolerance).total_cmp(&(b.abs_error - b.tolerance)))
            .cloned();
        Summary {
            format: "partlab-summary/1",
            scenario: scenario.into(),
            seed,
            records: results.len(),
            passed,
            failed: results.len() - passed,
            all_pass: passed == results.len(),
            worst_failure,
            results,
        }
    }
}

/// Where the two reports of a run go.
#[derive(Clone, Debug, PartialEq)]
pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
}

pub fn write_reports(summary: &Summary, csv: &Path, json: &Path) -> Result<Written> {
    for p in [csv, json] {
        if let Some(dir) = p.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
    }
    std::fs::write(csv, to_csv(&summary.results))?;
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(json, text)?;
    Ok(Written { csv: csv.to_path_buf(), json: json.to_path_buf() })
}
