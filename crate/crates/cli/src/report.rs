//! Report schema and writers.
//!
//! Each grid cell produces `cell_<index>.json`:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "kind": "hydrodynamics",
//!   "cell": 0,
//!   "n": [200], "theta": 1.0, "alpha": 0.1, "beta": 0.9, "rho": 0.5,
//!   "seed": 1234, "replicas": 1000,
//!   "statistics": [
//!     {"statistic": "l1_t0.1", "estimate": 0.011, "stderr": null,
//!      "theory": 0.0, "z_score": null, "tolerance": 0.02, "pass": true}
//!   ],
//!   "series": ["profile_cell000.csv"],
//!   "error": null,
//!   "pass": true
//! }
//! ```
//!
//! `summary.csv` has one row per statistic across all cells. Reports carry
//! no timings or host details, so reruns are byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Statistic {
    pub statistic: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub theory: f64,
    pub z_score: Option<f64>,
    /// Band half-width in standard errors for statistical gates, absolute
    /// bound for deterministic ones.
    pub tolerance: f64,
    pub pass: bool,
}

impl Statistic {
    /// `|estimate - theory| <= sigmas * stderr`.
    pub fn banded(name: impl Into<String>, estimate: f64, stderr: f64, theory: f64, sigmas: f64) -> Self {
        let z = if stderr > 0.0 {
            (estimate - theory) / stderr
        } else if estimate == theory {
            0.0
        } else {
            f64::INFINITY.copysign(estimate - theory)
        };
        Self {
            statistic: name.into(),
            estimate,
            stderr: Some(stderr),
            theory,
            z_score: Some(z),
            tolerance: sigmas,
            pass: z.abs() <= sigmas,
        }
    }

    /// `estimate <= bound`, no sampling error attached.
    pub fn bounded(name: impl Into<String>, estimate: f64, bound: f64) -> Self {
        Self {
            statistic: name.into(),
            estimate,
            stderr: None,
            theory: 0.0,
            z_score: None,
            tolerance: bound,
            pass: estimate <= bound,
        }
    }

    /// `estimate <= bound` for an estimate with a standard error.
    pub fn upper(name: impl Into<String>, estimate: f64, stderr: f64, theory: f64, bound: f64) -> Self {
        Self {
            statistic: name.into(),
            estimate,
            stderr: Some(stderr),
            theory,
            z_score: (stderr > 0.0).then(|| (estimate - theory) / stderr),
            tolerance: bound,
            pass: estimate <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub cell: usize,
    pub n: Vec<usize>,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub seed: u64,
    pub replicas: usize,
    pub statistics: Vec<Statistic>,
    pub series: Vec<String>,
    pub error: Option<String>,
    pub pass: bool,
}

impl CellReport {
    pub fn finish(mut self) -> Self {
        self.pass = self.error.is_none() && self.statistics.iter().all(|s| s.pass);
        self
    }

    pub fn file_name(&self) -> String {
        format!("cell_{:03}.json", self.cell)
    }
}

fn json_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(json_number).unwrap_or_default()
}

/// Writes every cell report and the aggregate `summary.csv`.
pub fn write_reports(dir: &Path, cells: &[CellReport]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for cell in cells {
        let mut text = serde_json::to_string_pretty(cell).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(dir.join(cell.file_name()), text)?;
    }
    let mut csv = Vec::new();
    writeln!(csv, "cell,kind,n,theta,statistic,estimate,stderr,theory,z_score,tolerance,pass")?;
    for cell in cells {
        let n = cell.n.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        for s in &cell.statistics {
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{},{}",
                cell.cell,
                cell.kind,
                n,
                cell.theta,
                s.statistic,
                json_number(s.estimate),
                opt(s.stderr),
                json_number(s.theory),
                opt(s.z_score),
                json_number(s.tolerance),
                s.pass
            )?;
        }
        if cell.error.is_some() {
            writeln!(csv, "{},{},{},{},error,,,,,,false", cell.cell, cell.kind, n, cell.theta)?;
        }
    }
    fs::write(dir.join("summary.csv"), csv)
}

/// Exit status from report contents alone: 0 iff every cell passes.
pub fn exit_status(cells: &[CellReport]) -> i32 {
    if cells.iter().all(|c| c.pass) {
        0
    } else {
        1
    }
}
