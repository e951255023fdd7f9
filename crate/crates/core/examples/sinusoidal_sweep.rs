//! How the success rate of each PAM falls as the sinusoidal target
//! oscillates faster.
//!
//! `cargo run --release --example sinusoidal_sweep`

use tpam::plan::{run_experiment, ExperimentPlan, RunOptions, TargetFamily};

fn main() -> tpam::error::Result<()> {
    let out = tempfile::tempdir().expect("temporary directory");
    let mut plan = ExperimentPlan {
        name: "sin".into(),
        out_dir: out.path().to_owned(),
        runs: 21,
        ..ExperimentPlan::default()
    };
    plan.grid.families = vec![TargetFamily::Sin];
    plan.grid.omega = vec![10.0, 20.0, 30.0, 40.0];
    plan.grid.p_max = vec![1.0];

    let result = run_experiment(&plan, &RunOptions { quiet: true, ..RunOptions::default() })?;

    print!("{:<8}", "pam");
    for omega in &plan.grid.omega {
        print!(" {:>9}", format!("w={omega}"));
    }
    println!();
    for pam in &plan.pams {
        print!("{:<8}", pam.as_str());
        for (_, stats) in result.summary.rows.iter().filter(|(c, _)| c.pam == *pam) {
            print!(" {:>9.5}", stats.mean);
        }
        println!();
    }
    Ok(())
}
