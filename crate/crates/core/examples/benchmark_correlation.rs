//! Compares the ranking of PAMs by simulated tracking ability with their
//! ranking by final error of real DE runs, using Spearman's rank
//! correlation.
//!
//! `cargo run --release --example benchmark_correlation`

use tpam::de::{run_adaptive_de, Benchmark, DeConfig};
use tpam::pam::{PamHyper, PamKind};
use tpam::sim::{run_seed, simulate_run, SimConfig};
use tpam::targets::TargetSpec;

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len().is_multiple_of(2) {
        (values[m - 1] + values[m]) / 2.0
    } else {
        values[m]
    }
}

/// Midranks, 1-based.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        for &k in &order[i..=j] {
            out[k] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn main() -> tpam::error::Result<()> {
    let pams = PamKind::ADAPTIVE;
    let runs = 11;
    let hyper = PamHyper::default();

    let mut tracking = Vec::new();
    let mut error = Vec::new();
    for pam in pams {
        let mut rates = Vec::new();
        for target in [TargetSpec::LinInc, TargetSpec::Sin { omega: 20.0 }] {
            for run in 0..runs {
                let config = SimConfig { seed: run_seed(0, run), ..SimConfig::default() };
                rates.push(simulate_run(pam, &hyper, &target, &config)?.r_succ);
            }
        }
        let finals = (0..runs)
            .map(|run| {
                let mut config = DeConfig::new(10, pam, run_seed(0, run));
                config.max_evals = 30_000;
                run_adaptive_de(&config, Benchmark::Rosenbrock).map(|t| t.best_f())
            })
            .collect::<tpam::error::Result<Vec<_>>>()?;
        let (rate, err) = (rates.iter().sum::<f64>() / rates.len() as f64, median(finals));
        println!("{:<6} mean r_succ {:.5}  median rosenbrock error {:.4e}", pam.as_str(), rate, err);
        tracking.push(rate);
        // Lower error is better, so negate to align the two rankings.
        error.push(-err);
    }
    let rho = pearson(&ranks(&tracking), &ranks(&error));
    println!("\nSpearman correlation between tracking and search quality: {rho:.3}");
    Ok(())
}
