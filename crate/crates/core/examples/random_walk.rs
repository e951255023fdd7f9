//! Every PAM tracks the same random-walk instance: the walk is seeded
//! separately from the PAM's own randomness.
//!
//! `cargo run --release --example random_walk`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tpam::pam::{PamHyper, PamKind};
use tpam::sim::{simulate_run, LogLevel, SimConfig};
use tpam::targets::TargetSpec;

fn main() -> tpam::error::Result<()> {
    let spec = TargetSpec::RandomWalk { step: 0.05 };
    let hyper = PamHyper::default();

    // The raw trajectory for a given seed, independent of any PAM.
    let walk = tpam::targets::trajectory(&spec, 1000, &mut ChaCha8Rng::seed_from_u64(1))?;
    let (lo, hi) = walk.iter().fold((1.0f64, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!("walk over 1000 iterations stays in [{lo:.3}, {hi:.3}]");

    for walk_seed in [7, 8] {
        println!("\nwalk instance {walk_seed}");
        let mut first_target = None;
        for pam in PamKind::ADAPTIVE {
            let config = SimConfig {
                seed: 100,
                walk_seed: Some(walk_seed),
                log_level: LogLevel::FullTrace,
                ..SimConfig::default()
            };
            let run = simulate_run(pam, &hyper, &spec, &config)?;
            let trace = run.trace.expect("full trace requested");
            let targets: Vec<f64> = trace.iterations.iter().filter_map(|it| it.target.c).collect();
            let same = first_target.get_or_insert_with(|| targets.clone()) == &targets;
            println!("  {:<6} r_succ={:.5} same walk as first PAM: {same}", pam.as_str(), run.r_succ);
        }
    }
    Ok(())
}
