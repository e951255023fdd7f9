//! Mean success rate of every PAM on the increasing and decreasing linear
//! targets, for a few values of p_max.
//!
//! `cargo run --release --example linear_targets`

use tpam::pam::PamKind;
use tpam::plan::{run_experiment, ExperimentPlan, RunOptions, TargetFamily};

fn main() -> tpam::error::Result<()> {
    let out = tempfile::tempdir().expect("temporary directory");
    let mut plan = ExperimentPlan {
        name: "linear".into(),
        out_dir: out.path().to_owned(),
        runs: 21,
        ..ExperimentPlan::default()
    };
    plan.grid.families = vec![TargetFamily::LinInc, TargetFamily::LinDec];
    plan.grid.p_max = vec![0.2, 0.6, 1.0];

    let result = run_experiment(&plan, &RunOptions { quiet: true, ..RunOptions::default() })?;

    println!("{:<8} {:<8} {:>6} {:>10} {:>10}", "pam", "target", "p_max", "mean", "std");
    for (cell, stats) in &result.summary.rows {
        println!(
            "{:<8} {:<8} {:>6} {:>10.5} {:>10.5}",
            cell.pam.as_str(),
            cell.target.family(),
            cell.p_max,
            stats.mean,
            stats.std
        );
    }

    let best = |family: &str, p_max: f64| {
        result
            .summary
            .rows
            .iter()
            .filter(|(c, _)| c.target.family() == family && c.p_max == p_max)
            .max_by(|a, b| a.1.mean.total_cmp(&b.1.mean))
            .map(|(c, _)| c.pam)
            .unwrap_or(PamKind::Jade)
    };
    println!("\nbest on lin_inc at p_max=1: {}", best("lin_inc", 1.0));
    println!("best on lin_dec at p_max=1: {}", best("lin_dec", 1.0));
    Ok(())
}
