//! Tracking experiments: a grid of PAM × target × `p_max` cells, each run
//! many times with consecutive seeds.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{load_toml, thread_pool, RunOptions, INCOMPLETE_MARKER};
use crate::analysis::{aggregate, CellKey, ExperimentSummary, RunOutcome};
use crate::error::{Error, Result};
use crate::io::{self, as_recorded, fmt_float, RunRow};
use crate::pam::{AdaptationMode, PamHyper, PamKind};
use crate::sim::{run_seed, simulate_run, LogLevel, PairDistance, SimConfig};
use crate::targets::TargetSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFamily {
    Const,
    LinInc,
    LinDec,
    Sin,
    RandomWalk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub n: usize,
    pub t_max: usize,
    pub alpha: f64,
    pub mode: AdaptationMode,
    pub strict_pseudocode: bool,
    pub pair_distance: PairDistance,
    /// Separate C target in pair mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_c: Option<TargetSpec>,
}

impl Default for SimSettings {
    fn default() -> Self {
        let sim = SimConfig::default();
        SimSettings {
            n: sim.n,
            t_max: sim.t_max,
            alpha: sim.alpha,
            mode: sim.mode,
            strict_pseudocode: sim.strict_pseudocode,
            pair_distance: sim.pair_distance,
            target_c: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub families: Vec<TargetFamily>,
    pub p_max: Vec<f64>,
    /// Frequencies used by the `sin` family.
    pub omega: Vec<f64>,
    /// Step sizes used by the `random_walk` family.
    pub step: Vec<f64>,
}

fn tenths(from: u32) -> Vec<f64> {
    (from..=10).map(|i| i as f64 / 10.0).collect()
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            families: vec![TargetFamily::LinInc, TargetFamily::LinDec],
            p_max: tenths(1),
            omega: vec![10.0, 20.0, 30.0, 40.0],
            step: (1..=10).map(|i| i as f64 / 100.0).collect(),
        }
    }
}

/// A declarative experiment. Every field has a default, so an empty file
/// describes the linear-target sweep over all five PAMs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentPlan {
    pub name: String,
    pub out_dir: PathBuf,
    pub pams: Vec<PamKind>,
    pub runs: u64,
    pub base_seed: u64,
    /// Write per-run traces and meta-parameter snapshots.
    pub trace: bool,
    pub sim: SimSettings,
    pub grid: Grid,
    pub hyper: PamHyper,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            name: "experiment".into(),
            out_dir: "results".into(),
            pams: PamKind::ADAPTIVE.to_vec(),
            runs: 101,
            base_seed: 0,
            trace: false,
            sim: SimSettings::default(),
            grid: Grid::default(),
            hyper: PamHyper::default(),
        }
    }
}

fn nonempty<T>(field: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        Err(Error::config(field, "must not be empty"))
    } else {
        Ok(())
    }
}

pub(super) fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(Error::config("name", format!("`{name}` is not a plain directory name")));
    }
    Ok(())
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            what: "experiment plan",
            path: PathBuf::from("<string>"),
            reason: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        load_toml(path, "experiment plan")
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("plan", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        check_name(&self.name)?;
        nonempty("pams", &self.pams)?;
        nonempty("grid.families", &self.grid.families)?;
        nonempty("grid.p_max", &self.grid.p_max)?;
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if let Some(p) = self.grid.p_max.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::config("grid.p_max", format!("{p} not in [0, 1]")));
        }
        if self.grid.families.contains(&TargetFamily::Sin) {
            nonempty("grid.omega", &self.grid.omega)?;
        }
        if self.grid.families.contains(&TargetFamily::RandomWalk) {
            nonempty("grid.step", &self.grid.step)?;
        }
        if self.sim.t_max < 2 && self.sim.strict_pseudocode {
            return Err(Error::config("sim.t_max", "strict pseudocode needs at least 2"));
        }
        for target in self.targets() {
            target.validate().map_err(|e| prefix("grid", e))?;
        }
        self.sim_config(1.0, 0).validate().map_err(|e| prefix("sim", e))?;
        for &pam in &self.pams {
            self.hyper.validate(pam).map_err(|e| prefix("hyper", e))?;
        }
        Ok(())
    }

    /// Target specs in grid order.
    pub fn targets(&self) -> Vec<TargetSpec> {
        let mut out = Vec::new();
        for family in &self.grid.families {
            match family {
                TargetFamily::Const => out.push(TargetSpec::Const),
                TargetFamily::LinInc => out.push(TargetSpec::LinInc),
                TargetFamily::LinDec => out.push(TargetSpec::LinDec),
                TargetFamily::Sin => out.extend(self.grid.omega.iter().map(|&omega| TargetSpec::Sin { omega })),
                TargetFamily::RandomWalk => {
                    out.extend(self.grid.step.iter().map(|&step| TargetSpec::RandomWalk { step }))
                }
            }
        }
        out
    }

    /// All cells, sorted and deduplicated.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &pam in &self.pams {
            for target in self.targets() {
                for &p_max in &self.grid.p_max {
                    cells.push(CellKey { pam, target, p_max });
                }
            }
        }
        cells.sort();
        cells.dedup();
        cells
    }

    pub fn sim_config(&self, p_max: f64, seed: u64) -> SimConfig {
        SimConfig {
            n: self.sim.n,
            t_max: self.sim.t_max,
            alpha: self.sim.alpha,
            p_max,
            mode: self.sim.mode,
            seed,
            log_level: if self.trace { LogLevel::FullTrace } else { LogLevel::Summary },
            strict_pseudocode: self.sim.strict_pseudocode,
            pair_distance: self.sim.pair_distance,
            target_c: self.sim.target_c,
            walk_seed: None,
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.out_dir.join(&self.name)
    }
}

fn prefix(section: &str, e: Error) -> Error {
    match e {
        Error::Config { field, reason } => Error::Config {
            field: format!("{section}.{field}"),
            reason,
        },
        other => other,
    }
}

/// File stem identifying one cell.
pub fn cell_slug(cell: &CellKey) -> String {
    let mut s = format!("{}_{}", cell.pam, cell.target.family());
    if let Some(p) = cell.target.parameter() {
        s.push('_');
        s.push_str(&fmt_float(p));
    }
    s.push_str("_p");
    s.push_str(&fmt_float(cell.p_max));
    s
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub dir: PathBuf,
    pub runs: Vec<RunRow>,
    pub summary: ExperimentSummary,
}

/// Runs every cell of `plan` and writes `runs.csv`, `summary.csv` and, if
/// requested, `traces/`. The summary is computed from the values as
/// recorded in `runs.csv`, so re-aggregating that file reproduces it
/// exactly. A marker file flags the directory as incomplete until the last
/// file is written.
pub fn run_experiment(plan: &ExperimentPlan, options: &RunOptions) -> Result<ExperimentOutput> {
    plan.validate()?;
    let dir = plan.output_dir();
    fs::create_dir_all(&dir)?;
    let marker = dir.join(INCOMPLETE_MARKER);
    fs::write(&marker, "experiment did not finish\n")?;
    fs::write(dir.join("plan.toml"), plan.to_toml()?)?;
    let trace_dir = dir.join("traces");
    if plan.trace {
        fs::create_dir_all(&trace_dir)?;
    }

    let cells = plan.cells();
    let pool = thread_pool(options.jobs)?;
    let mut rows = Vec::with_capacity(cells.len() * plan.runs as usize);
    for (k, cell) in cells.iter().enumerate() {
        let cell_rows = pool.install(|| {
            (0..plan.runs)
                .into_par_iter()
                .map(|run| {
                    let seed = run_seed(plan.base_seed, run);
                    let config = plan.sim_config(cell.p_max, seed);
                    let result = simulate_run(cell.pam, &plan.hyper, &cell.target, &config)?;
                    if let Some(trace) = &result.trace {
                        let stem = format!("{}_run{run:03}", cell_slug(cell));
                        io::write_trace(&trace_dir.join(format!("{stem}.csv")), trace)?;
                        io::write_meta(&trace_dir.join(format!("{stem}_meta.csv")), trace)?;
                    }
                    Ok(RunRow {
                        outcome: RunOutcome {
                            cell: *cell,
                            run,
                            r_succ: as_recorded(result.r_succ),
                        },
                        seed,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        if !options.quiet {
            let mean = cell_rows.iter().map(|r| r.outcome.r_succ).sum::<f64>() / cell_rows.len() as f64;
            eprintln!(
                "[{}/{}] {} {} p_max={} mean r_succ={}",
                k + 1,
                cells.len(),
                cell.pam,
                cell.target,
                fmt_float(cell.p_max),
                fmt_float(mean)
            );
        }
        rows.extend(cell_rows);
    }

    let outcomes: Vec<RunOutcome> = rows.iter().map(|r| r.outcome).collect();
    let summary = aggregate(&outcomes)?;
    io::write_runs(&dir.join("runs.csv"), &rows)?;
    io::write_summary(&dir.join("summary.csv"), &summary)?;
    fs::remove_file(&marker)?;
    Ok(ExperimentOutput { dir, runs: rows, summary })
}
