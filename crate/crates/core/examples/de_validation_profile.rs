//! Success probability of real DE trials as a function of how far the
//! sampled F and C lie from the smoothed successful-parameter trajectory.
//!
//! `cargo run --release --example de_validation_profile`

use tpam::analysis::MIN_BIN_SAMPLES;
use tpam::plan::{run_validation, DePlan, RunOptions};

fn main() -> tpam::error::Result<()> {
    let out = tempfile::tempdir().expect("temporary directory");
    let plan = DePlan {
        out_dir: out.path().to_owned(),
        runs: 5,
        ..DePlan::default()
    };
    let result = run_validation(&plan, &RunOptions { quiet: true, ..RunOptions::default() })?;

    for cell in &result.profiles {
        for (name, profile) in [("F", &cell.f), ("C", &cell.c)] {
            let Some(profile) = profile else {
                println!("{} {name}: no successful trials", cell.cell.slug());
                continue;
            };
            println!(
                "{} {name}: {} trials, {} inversions among well-filled bins",
                cell.cell.slug(),
                profile.total(),
                profile.inversions(MIN_BIN_SAMPLES)
            );
            for bin in &profile.bins {
                let p = bin.probability().map_or("-".to_string(), |p| format!("{p:.3}"));
                println!("  [{:.3}, {:.3})  n={:>6}  p={p}", bin.lo, bin.hi, bin.total);
            }
        }
    }
    Ok(())
}
