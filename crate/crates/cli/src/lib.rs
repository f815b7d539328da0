//! Declarative experiment runner for the slow-boundary exclusion process.

pub mod config;
pub mod pipeline;
pub mod report;

use std::path::Path;

pub use config::{parse_config, ConfigErrors, ExperimentConfig, ExperimentKind};
pub use pipeline::{plan, run_cell, Cell, Stage};
pub use report::{exit_status, write_reports, CellReport, Statistic, SCHEMA_VERSION};

/// Command-line verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Exact,
    Simulate,
    Pde,
    Fluct,
    Sweep,
}

impl Verb {
    pub fn accepts(self, kind: ExperimentKind) -> bool {
        use ExperimentKind::*;
        match self {
            Verb::Exact => kind == ExactCheck,
            Verb::Simulate | Verb::Pde => matches!(kind, Hydrodynamics | Hydrostatics),
            Verb::Fluct => matches!(kind, QvCheck | Gaussianity | OuCovariance | ReplacementScaling),
            Verb::Sweep => true,
        }
    }

    pub fn stage(self) -> Stage {
        match self {
            Verb::Pde => Stage::PdeOnly,
            _ => Stage::Full,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verb::Exact => "exact",
            Verb::Simulate => "simulate",
            Verb::Pde => "pde",
            Verb::Fluct => "fluct",
            Verb::Sweep => "sweep",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("`{verb}` does not run {kind} experiments")]
    WrongVerb { verb: &'static str, kind: ExperimentKind },
    #[error("cannot write reports to {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

/// Runs every cell in grid order and writes the reports. Cells run one
/// after another; replicas inside a cell use the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig, verb: Verb) -> Result<(Vec<CellReport>, i32), RunError> {
    if !verb.accepts(cfg.kind) {
        return Err(RunError::WrongVerb {
            verb: verb.name(),
            kind: cfg.kind,
        });
    }
    let out: &Path = &cfg.out;
    let output_error = |source| RunError::Output {
        path: out.display().to_string(),
        source,
    };
    std::fs::create_dir_all(out).map_err(output_error)?;
    let cells: Vec<CellReport> = plan(cfg)
        .iter()
        .map(|cell| run_cell(cfg, cell, verb.stage(), out))
        .collect();
    write_reports(out, &cells).map_err(output_error)?;
    let status = exit_status(&cells);
    Ok((cells, status))
}
