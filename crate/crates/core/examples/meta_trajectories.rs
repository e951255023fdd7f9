//! Follows the meta-parameters of the median run of JADE and SHADE on the
//! increasing linear target, next to the target itself.
//!
//! `cargo run --release --example meta_trajectories`

use tpam::analysis::describe;
use tpam::pam::{PamHyper, PamKind};
use tpam::sim::{run_seed, simulate_run, LogLevel, SimConfig};
use tpam::targets::TargetSpec;

fn main() -> tpam::error::Result<()> {
    let spec = TargetSpec::LinInc;
    let hyper = PamHyper::default();
    let runs = 21;

    for pam in [PamKind::Jade, PamKind::Shade] {
        let config = |run| SimConfig { seed: run_seed(0, run), ..SimConfig::default() };
        let rates = (0..runs)
            .map(|run| simulate_run(pam, &hyper, &spec, &config(run)).map(|r| (run, r.r_succ)))
            .collect::<tpam::error::Result<Vec<_>>>()?;
        let stats = describe(&rates)?;

        let traced = SimConfig { log_level: LogLevel::FullTrace, ..config(stats.median_run) };
        let trace = simulate_run(pam, &hyper, &spec, &traced)?.trace.expect("full trace");
        println!("{pam}: median run {} with r_succ {:.5}", stats.median_run, stats.median);

        // JADE has a single mean; SHADE's memory is summarised by its average.
        let labels = &trace.meta_labels;
        println!("  {:>5} {:>8} {:>10}", "t", "target", "meta C");
        for it in trace.iterations.iter().step_by(100) {
            let c_values: Vec<f64> = labels
                .iter()
                .zip(&it.meta)
                .filter(|(l, _)| l.contains("_c"))
                .map(|(_, v)| *v)
                .collect();
            let meta_c = c_values.iter().sum::<f64>() / c_values.len() as f64;
            println!("  {:>5} {:>8.4} {:>10.4}", it.t, it.target.c.unwrap_or(f64::NAN), meta_c);
        }
    }
    Ok(())
}
