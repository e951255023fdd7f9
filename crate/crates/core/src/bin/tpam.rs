use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tpam::plan::{report, run_experiment, run_validation, DePlan, ExperimentPlan, ReportKind, RunOptions};

#[derive(Parser)]
#[command(name = "tpam", version, about = "Simulate and validate DE parameter adaptation methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tracking experiment plan.
    Run {
        plan: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Write per-run traces and meta-parameter snapshots.
        #[arg(long)]
        trace: bool,
        /// Execute t_max - 1 iterations, as the literal pseudocode loop does.
        #[arg(long)]
        strict_pseudocode: bool,
    },
    /// Run a DE validation plan.
    Validate {
        de_plan: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Re-aggregate a finished output directory.
    Report { dir: PathBuf },
}

#[derive(Args)]
struct Common {
    /// Base seed; run r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent runs per cell.
    #[arg(long)]
    runs: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory, overriding the plan's `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, short)]
    quiet: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            jobs: self.jobs,
            quiet: self.quiet,
        }
    }
}

fn execute(cli: Cli) -> tpam::error::Result<()> {
    match cli.command {
        Command::Run {
            plan,
            common,
            trace,
            strict_pseudocode,
        } => {
            let mut plan = ExperimentPlan::load(&plan)?;
            plan.base_seed = common.seed.unwrap_or(plan.base_seed);
            plan.runs = common.runs.unwrap_or(plan.runs);
            plan.trace |= trace;
            plan.sim.strict_pseudocode |= strict_pseudocode;
            if let Some(out) = &common.out {
                plan.out_dir = out.clone();
            }
            let output = run_experiment(&plan, &common.options())?;
            println!("{}", output.dir.join("summary.csv").display());
        }
        Command::Validate { de_plan, common } => {
            let mut plan = DePlan::load(&de_plan)?;
            plan.base_seed = common.seed.unwrap_or(plan.base_seed);
            plan.runs = common.runs.unwrap_or(plan.runs);
            if let Some(out) = &common.out {
                plan.out_dir = out.clone();
            }
            let output = run_validation(&plan, &common.options())?;
            println!("{}", output.dir.join("final_summary.csv").display());
        }
        Command::Report { dir } => match report(&dir)? {
            ReportKind::Experiment { cells } => println!("summary.csv: {cells} cells"),
            ReportKind::Validation { cells } => println!("final_summary.csv and profiles: {cells} cells"),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
