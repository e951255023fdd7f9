//! Real DE runs whose parameter logs are checked against the simulation's
//! acceptance model.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::check_name;
use super::{load_toml, thread_pool, RunOptions, INCOMPLETE_MARKER};
use crate::analysis::{
    distances, observations_from_de, profile_from_distances, smoothed_success_trajectory, Component,
    Observation, SuccessProfile,
};
use crate::de::{default_pop_size, run_adaptive_de, Benchmark, Crossover, DeConfig, DeTrace, Mutation};
use crate::error::{Error, Result};
use crate::io::{self, as_recorded, fmt_float};
use crate::pam::{PamHyper, PamKind};
use crate::sim::run_seed;

/// Final error at or below which a run counts as solved.
pub const SOLVED_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DePlan {
    pub name: String,
    pub out_dir: PathBuf,
    pub pams: Vec<PamKind>,
    pub functions: Vec<Benchmark>,
    pub dims: Vec<usize>,
    pub runs: u64,
    pub base_seed: u64,
    pub mutation: Mutation,
    pub crossover: Crossover,
    /// Budget is `evals_per_dim · D`.
    pub evals_per_dim: usize,
    /// Defaults to 20 up to three dimensions and `5·D` above.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pop_size: Option<usize>,
    pub p_best: f64,
    /// Defaults to the population size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archive_size: Option<usize>,
    /// Search box `[lo, hi]` in every dimension.
    pub bounds: [f64; 2],
    pub hyper: PamHyper,
    /// End a run once its final error reaches the solved threshold.
    pub stop_at_target: bool,
    pub bins: usize,
    /// Smoothing window as a fraction of the generations of each run.
    pub window_fraction: f64,
}

impl Default for DePlan {
    fn default() -> Self {
        DePlan {
            name: "validation".into(),
            out_dir: "results".into(),
            pams: vec![PamKind::Jade],
            functions: vec![Benchmark::Rosenbrock],
            dims: vec![10],
            runs: 15,
            base_seed: 0,
            mutation: Mutation::CurrentToPbest1,
            crossover: Crossover::Binomial,
            evals_per_dim: 10_000,
            pop_size: None,
            p_best: 0.05,
            archive_size: None,
            bounds: [-5.0, 5.0],
            hyper: PamHyper::original(),
            stop_at_target: true,
            bins: crate::analysis::DEFAULT_BINS,
            window_fraction: 0.05,
        }
    }
}

/// One DE configuration of a validation plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeCell {
    pub pam: PamKind,
    pub function: Benchmark,
    pub dim: usize,
}

impl DeCell {
    pub fn slug(&self) -> String {
        format!("{}_{}_d{}", self.pam, self.function, self.dim)
    }
}

impl DePlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            what: "validation plan",
            path: PathBuf::from("<string>"),
            reason: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        load_toml(path, "validation plan")
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("plan", e.to_string()))
    }

    pub fn cells(&self) -> Vec<DeCell> {
        let mut out = Vec::new();
        for &pam in &self.pams {
            for &function in &self.functions {
                for &dim in &self.dims {
                    out.push(DeCell { pam, function, dim });
                }
            }
        }
        out
    }

    pub fn de_config(&self, cell: &DeCell, seed: u64) -> DeConfig {
        let pop_size = self.pop_size.unwrap_or_else(|| default_pop_size(cell.dim));
        DeConfig {
            dim: cell.dim,
            pop_size,
            max_evals: self.evals_per_dim * cell.dim,
            mutation: self.mutation,
            crossover: self.crossover,
            p_best: self.p_best,
            archive_size: self.archive_size.unwrap_or(pop_size),
            bounds: vec![(self.bounds[0], self.bounds[1]); cell.dim],
            pam: cell.pam,
            hyper: self.hyper.clone(),
            seed,
            target_fitness: self.stop_at_target.then_some(SOLVED_THRESHOLD),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_name(&self.name)?;
        for (field, empty) in [
            ("pams", self.pams.is_empty()),
            ("functions", self.functions.is_empty()),
            ("dims", self.dims.is_empty()),
        ] {
            if empty {
                return Err(Error::config(field, "must not be empty"));
            }
        }
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.bins == 0 {
            return Err(Error::config("bins", "must be at least 1"));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return Err(Error::config("window_fraction", "must be in (0, 1]"));
        }
        for cell in self.cells() {
            self.de_config(&cell, 0).validate()?;
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.out_dir.join(&self.name)
    }

    pub(super) fn window(&self, generations: usize) -> usize {
        ((generations as f64 * self.window_fraction).round() as usize).max(1)
    }
}

/// Result of one DE run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FinalRow {
    pub cell: DeCell,
    pub run: u64,
    pub seed: u64,
    pub best_f: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct CellProfiles {
    pub cell: DeCell,
    pub f: Option<SuccessProfile>,
    pub c: Option<SuccessProfile>,
}

#[derive(Clone, Debug)]
pub struct ValidationOutput {
    pub dir: PathBuf,
    pub finals: Vec<FinalRow>,
    pub profiles: Vec<CellProfiles>,
}

/// Distances of one run's observations from their smoothed successful
/// trajectory; empty when the run had no success to smooth.
pub fn run_distances(log: &[Observation], window: usize) -> Result<Vec<(f64, bool)>> {
    match smoothed_success_trajectory(log, window) {
        Ok(curve) => distances(log, &curve),
        Err(Error::EmptyInput) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

/// Profile of the distances pooled over all runs; `None` if no run had a
/// success.
pub fn pooled_profile(per_run: &[Vec<(f64, bool)>], bins: usize) -> Result<Option<SuccessProfile>> {
    let pooled: Vec<(f64, bool)> = per_run.iter().flatten().copied().collect();
    if pooled.is_empty() {
        return Ok(None);
    }
    profile_from_distances(&pooled, bins).map(Some)
}

/// Observations with values rounded as in the parameter log, so profiles
/// rebuilt from the files match the ones computed during the run.
fn recorded_log(trace: &DeTrace, component: Component) -> Vec<Observation> {
    let mut log = observations_from_de(trace, component);
    for o in &mut log {
        o.value = as_recorded(o.value);
    }
    log
}

pub const FINAL_HEADER: [&str; 7] = ["pam", "function", "dim", "run", "seed", "best_f", "evaluations"];
pub const FINAL_SUMMARY_HEADER: [&str; 9] = [
    "pam", "function", "dim", "runs", "solved", "median", "mean", "min", "max",
];

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Per-cell statistics of the final errors, in first-appearance order.
pub fn final_summary_rows(finals: &[FinalRow]) -> Vec<Vec<String>> {
    let mut cells: Vec<DeCell> = Vec::new();
    for row in finals {
        if !cells.contains(&row.cell) {
            cells.push(row.cell);
        }
    }
    cells
        .iter()
        .map(|cell| {
            let mut values: Vec<f64> = finals.iter().filter(|r| r.cell == *cell).map(|r| r.best_f).collect();
            values.sort_by(f64::total_cmp);
            let solved = values.iter().filter(|&&v| v <= SOLVED_THRESHOLD).count();
            vec![
                cell.pam.to_string(),
                cell.function.to_string(),
                cell.dim.to_string(),
                values.len().to_string(),
                solved.to_string(),
                fmt_float(median(&values)),
                fmt_float(values.iter().sum::<f64>() / values.len() as f64),
                fmt_float(values[0]),
                fmt_float(values[values.len() - 1]),
            ]
        })
        .collect()
}

pub(super) fn write_finals(dir: &Path, finals: &[FinalRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = finals
        .iter()
        .map(|r| {
            vec![
                r.cell.pam.to_string(),
                r.cell.function.to_string(),
                r.cell.dim.to_string(),
                r.run.to_string(),
                r.seed.to_string(),
                fmt_float(r.best_f),
                r.evaluations.to_string(),
            ]
        })
        .collect();
    io::write_table(&dir.join("final.csv"), &FINAL_HEADER, &rows)?;
    io::write_table(&dir.join("final_summary.csv"), &FINAL_SUMMARY_HEADER, &final_summary_rows(finals))
}

pub(super) fn write_profiles(cell_dir: &Path, f: &Option<SuccessProfile>, c: &Option<SuccessProfile>) -> Result<()> {
    for (name, profile) in [("profile_f.csv", f), ("profile_c.csv", c)] {
        if let Some(profile) = profile {
            io::write_profile(&cell_dir.join(name), profile)?;
        }
    }
    Ok(())
}

/// Runs every DE cell, writing per-run best-f curves and parameter logs,
/// pooled success-probability profiles for F and C per cell, and the table
/// of final errors.
pub fn run_validation(plan: &DePlan, options: &RunOptions) -> Result<ValidationOutput> {
    plan.validate()?;
    let dir = plan.output_dir();
    fs::create_dir_all(&dir)?;
    let marker = dir.join(INCOMPLETE_MARKER);
    fs::write(&marker, "validation did not finish\n")?;
    fs::write(dir.join("plan.toml"), plan.to_toml()?)?;
    let pool = thread_pool(options.jobs)?;

    let cells = plan.cells();
    let mut finals = Vec::new();
    let mut profiles = Vec::new();
    for (k, cell) in cells.iter().enumerate() {
        let cell_dir = dir.join(cell.slug());
        let results = pool.install(|| {
            (0..plan.runs)
                .into_par_iter()
                .map(|run| {
                    let seed = run_seed(plan.base_seed, run);
                    let trace = run_adaptive_de(&plan.de_config(cell, seed), cell.function)?;
                    let stem = format!("run{run:03}.csv");
                    io::write_best_f(&cell_dir.join("best_f").join(&stem), &trace)?;
                    io::write_param_log(&cell_dir.join("params").join(&stem), &trace)?;
                    let window = plan.window(trace.generations.len());
                    let d_f = run_distances(&recorded_log(&trace, Component::F), window)?;
                    let d_c = run_distances(&recorded_log(&trace, Component::C), window)?;
                    let row = FinalRow {
                        cell: *cell,
                        run,
                        seed,
                        best_f: as_recorded(trace.best_f()),
                        evaluations: trace.evaluations,
                    };
                    Ok((row, d_f, d_c))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let (rows, (d_f, d_c)): (Vec<FinalRow>, (Vec<_>, Vec<_>)) =
            results.into_iter().map(|(r, f, c)| (r, (f, c))).unzip();
        let f = pooled_profile(&d_f, plan.bins)?;
        let c = pooled_profile(&d_c, plan.bins)?;
        write_profiles(&cell_dir, &f, &c)?;
        if !options.quiet {
            let solved = rows.iter().filter(|r| r.best_f <= SOLVED_THRESHOLD).count();
            eprintln!(
                "[{}/{}] {} solved {solved}/{} best_f median={}",
                k + 1,
                cells.len(),
                cell.slug(),
                rows.len(),
                fmt_float(median(&{
                    let mut v: Vec<f64> = rows.iter().map(|r| r.best_f).collect();
                    v.sort_by(f64::total_cmp);
                    v
                }))
            );
        }
        finals.extend(rows);
        profiles.push(CellProfiles { cell: *cell, f, c });
    }
    write_finals(&dir, &finals)?;
    fs::remove_file(&marker)?;
    Ok(ValidationOutput { dir, finals, profiles })
}
