//! Declarative experiment plans, their runners, and re-aggregation of
//! finished output directories.

pub mod experiment;
pub mod validation;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::analysis::{aggregate, Component, RunOutcome};
use crate::error::{Error, Result};
use crate::io;
pub use experiment::{cell_slug, run_experiment, ExperimentOutput, ExperimentPlan, Grid, SimSettings, TargetFamily};
pub use validation::{run_validation, DeCell, DePlan, FinalRow, ValidationOutput, SOLVED_THRESHOLD};

/// Present in an output directory while it is being written.
pub const INCOMPLETE_MARKER: &str = "INCOMPLETE";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; all cores when `None`.
    pub jobs: Option<usize>,
    /// Suppress the per-cell progress lines.
    pub quiet: bool,
}

pub(crate) fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(Error::config("jobs", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))
}

pub(crate) fn load_toml<T: DeserializeOwned>(path: &Path, what: &'static str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        what,
        path: path.to_owned(),
        reason: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        what,
        path: path.to_owned(),
        reason: e.message().to_string(),
    })
}

/// What `report` regenerated.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportKind {
    /// `summary.csv` from `runs.csv`.
    Experiment { cells: usize },
    /// `final_summary.csv` from `final.csv` and profiles from the
    /// parameter logs.
    Validation { cells: usize },
}

/// Re-aggregates a finished output directory.
pub fn report(dir: &Path) -> Result<ReportKind> {
    if dir.join(INCOMPLETE_MARKER).exists() {
        return Err(Error::config(
            "dir",
            format!("{} is marked incomplete", dir.display()),
        ));
    }
    let runs = dir.join("runs.csv");
    if runs.exists() {
        let outcomes: Vec<RunOutcome> = io::read_runs(&runs)?.into_iter().map(|r| r.outcome).collect();
        let summary = aggregate(&outcomes)?;
        io::write_summary(&dir.join("summary.csv"), &summary)?;
        return Ok(ReportKind::Experiment {
            cells: summary.rows.len(),
        });
    }
    if dir.join("final.csv").exists() {
        return report_validation(dir);
    }
    Err(Error::config(
        "dir",
        format!("{} holds neither runs.csv nor final.csv", dir.display()),
    ))
}

fn report_validation(dir: &Path) -> Result<ReportKind> {
    let plan_path = dir.join("plan.toml");
    let plan = if plan_path.exists() {
        DePlan::load(&plan_path)?
    } else {
        DePlan::default()
    };
    let finals = read_finals(&dir.join("final.csv"))?;
    io::write_table(
        &dir.join("final_summary.csv"),
        &validation::FINAL_SUMMARY_HEADER,
        &validation::final_summary_rows(&finals),
    )?;

    let mut cells: Vec<DeCell> = Vec::new();
    for row in &finals {
        if !cells.contains(&row.cell) {
            cells.push(row.cell);
        }
    }
    for cell in &cells {
        let cell_dir = dir.join(cell.slug());
        let logs = param_logs(&cell_dir.join("params"))?;
        let mut per_component = Vec::new();
        for component in [Component::F, Component::C] {
            let mut per_run = Vec::new();
            for path in &logs {
                let log = io::read_param_log(path, component)?;
                let generations = log.last().map_or(0, |o| o.t);
                per_run.push(validation::run_distances(&log, plan.window(generations))?);
            }
            per_component.push(validation::pooled_profile(&per_run, plan.bins)?);
        }
        validation::write_profiles(&cell_dir, &per_component[0], &per_component[1])?;
    }
    Ok(ReportKind::Validation { cells: cells.len() })
}

fn param_logs(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "csv"));
    paths.sort();
    Ok(paths)
}

fn read_finals(path: &Path) -> Result<Vec<FinalRow>> {
    let parse_err = |reason: String| Error::Parse {
        what: "final table",
        path: path.to_owned(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != validation::FINAL_HEADER {
        return Err(parse_err(format!("unexpected header {}", header.join(","))));
    }
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or_default();
        let bad = |k: usize| parse_err(format!("record {}: cannot parse `{}`", line + 1, field(k)));
        out.push(FinalRow {
            cell: DeCell {
                pam: field(0).parse().map_err(|_| bad(0))?,
                function: field(1).parse().map_err(|_| bad(1))?,
                dim: field(2).parse().map_err(|_| bad(2))?,
            },
            run: field(3).parse().map_err(|_| bad(3))?,
            seed: field(4).parse().map_err(|_| bad(4))?,
            best_f: field(5).parse().map_err(|_| bad(5))?,
            evaluations: field(6).parse().map_err(|_| bad(6))?,
        });
    }
    Ok(out)
}
