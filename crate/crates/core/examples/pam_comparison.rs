//! Pairwise rank-sum comparison of all PAMs on one cell.
//!
//! `cargo run --release --example pam_comparison`

use tpam::analysis::{compare, rank_sum, ComparisonVerdict};
use tpam::pam::{PamHyper, PamKind};
use tpam::sim::{run_seed, simulate_run, SimConfig};
use tpam::targets::TargetSpec;

fn main() -> tpam::error::Result<()> {
    let spec = TargetSpec::Sin { omega: 20.0 };
    let hyper = PamHyper::default();
    let runs = 31;

    let rates: Vec<(PamKind, Vec<f64>)> = PamKind::ADAPTIVE
        .iter()
        .map(|&pam| {
            let values = (0..runs)
                .map(|run| {
                    let config = SimConfig { seed: run_seed(0, run), p_max: 0.5, ..SimConfig::default() };
                    simulate_run(pam, &hyper, &spec, &config).map(|r| r.r_succ)
                })
                .collect::<tpam::error::Result<Vec<_>>>()?;
            Ok((pam, values))
        })
        .collect::<tpam::error::Result<_>>()?;

    println!("{spec}, p_max = 0.5, {runs} runs per PAM\n");
    for (i, (a, xs)) in rates.iter().enumerate() {
        for (b, ys) in &rates[i + 1..] {
            let test = rank_sum(xs, ys)?;
            let verdict = match compare(xs, ys)? {
                ComparisonVerdict::ABetter => format!("{a} better"),
                ComparisonVerdict::BBetter => format!("{b} better"),
                ComparisonVerdict::Tie => "no significant difference".to_string(),
            };
            println!("{a:>6} vs {b:<6} z={:>7.3} p={:.2e}  {verdict}", test.z, test.p_value);
        }
    }
    Ok(())
}
