//! End-to-end acceptance checks at full experimental scale.
//!
//! Runs as a plain binary and prints one PASS/FAIL line per criterion; the
//! process fails if any criterion does.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpam::analysis::{
    distances, inversions, observations_from_trace, rank_sum, target_curve, trend_holds, CellKey, Component,
    Direction, ExperimentSummary, Inversion, SuccessProfile, DEFAULT_BINS, MIN_BIN_SAMPLES,
};
use tpam::de::Benchmark;
use tpam::pam::{lehmer_mean, power_mean, PamHyper, PamKind};
use tpam::plan::{
    run_experiment, run_validation, DePlan, ExperimentOutput, ExperimentPlan, RunOptions, TargetFamily,
    ValidationOutput, SOLVED_THRESHOLD,
};
use tpam::sim::{simulate_run, LogLevel, SimConfig};
use tpam::targets::TargetSpec;

const RUNS: u64 = 101;
const INVERSION_TOLERANCE: f64 = 0.005;
const OMEGAS: [f64; 4] = [10.0, 20.0, 30.0, 40.0];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn quiet() -> RunOptions {
    RunOptions {
        jobs: None,
        quiet: true,
    }
}

fn experiment(dir: &Path, name: &str, families: Vec<TargetFamily>, p_max: Vec<f64>) -> ExperimentPlan {
    let mut plan = ExperimentPlan {
        name: name.into(),
        out_dir: dir.to_owned(),
        runs: RUNS,
        ..ExperimentPlan::default()
    };
    plan.grid.families = families;
    plan.grid.p_max = p_max;
    plan
}

fn mean(summary: &ExperimentSummary, pam: PamKind, target: TargetSpec, p_max: f64) -> f64 {
    summary
        .get(&CellKey { pam, target, p_max })
        .unwrap_or_else(|| panic!("missing cell {pam} {target} {p_max}"))
        .mean
}

fn per_run(output: &ExperimentOutput, pam: PamKind, target: TargetSpec, p_max: f64) -> Vec<f64> {
    let cell = CellKey { pam, target, p_max };
    output
        .runs
        .iter()
        .filter(|r| r.outcome.cell == cell)
        .map(|r| r.outcome.r_succ)
        .collect()
}

fn describe_inversions(inv: &[Inversion]) -> String {
    inv.iter()
        .map(|i| format!("#{}:{:.5}", i.index, i.magnitude))
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_seq(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", ")
}

fn criterion_1(linear: &ExperimentOutput, seconds: f64) -> Verdict {
    let p_grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let mut failures = Vec::new();
    for pam in PamKind::ADAPTIVE {
        for target in [TargetSpec::LinInc, TargetSpec::LinDec] {
            let means: Vec<f64> = p_grid.iter().map(|&p| mean(&linear.summary, pam, target, p)).collect();
            let inv = inversions(&means, Direction::Increasing, false);
            if !trend_holds(&inv, 1, INVERSION_TOLERANCE) {
                failures.push(format!("{pam}/{target}: {}", describe_inversions(&inv)));
            }
        }
    }
    let fast = seconds < 120.0;
    if !fast {
        failures.push(format!("grid took {seconds:.1} s"));
    }
    Verdict::new(
        failures.is_empty(),
        if failures.is_empty() {
            format!("10 sequences non-decreasing in p_max; 10100-run grid in {seconds:.1} s")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_2(sin: &ExperimentOutput) -> Verdict {
    let mut failures = Vec::new();
    for pam in PamKind::ADAPTIVE {
        for p in [0.1, 0.5, 1.0] {
            let means: Vec<f64> = OMEGAS
                .iter()
                .map(|&omega| mean(&sin.summary, pam, TargetSpec::Sin { omega }, p))
                .collect();
            let inv = inversions(&means, Direction::Decreasing, true);
            if !trend_holds(&inv, 1, INVERSION_TOLERANCE) {
                failures.push(format!("{pam} p={p}: [{}] {}", fmt_seq(&means), describe_inversions(&inv)));
            }
        }
    }
    Verdict::new(
        failures.is_empty(),
        if failures.is_empty() {
            "15 sequences strictly decreasing in omega".into()
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_3(walk: &ExperimentOutput) -> Verdict {
    let steps: Vec<f64> = (1..=10).map(|i| i as f64 / 100.0).collect();
    let mut failures = Vec::new();
    for pam in PamKind::ADAPTIVE {
        for p in [0.1, 1.0] {
            let means: Vec<f64> = steps
                .iter()
                .map(|&step| mean(&walk.summary, pam, TargetSpec::RandomWalk { step }, p))
                .collect();
            let inv = inversions(&means, Direction::Decreasing, false);
            if !inv.is_empty() {
                failures.push(format!("{pam} p={p}: [{}] {}", fmt_seq(&means), describe_inversions(&inv)));
            }
        }
    }
    Verdict::new(
        failures.is_empty(),
        if failures.is_empty() {
            "10 sequences decreasing in s".into()
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_4(sin: &ExperimentOutput) -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for omega in OMEGAS {
        let target = TargetSpec::Sin { omega };
        let mut ranked: Vec<(PamKind, f64)> = PamKind::ADAPTIVE
            .iter()
            .map(|&pam| (pam, mean(&sin.summary, pam, target, 1.0)))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (leader, runner_up) = (ranked[0], ranked[1]);
        let test = rank_sum(&per_run(sin, leader.0, target, 1.0), &per_run(sin, runner_up.0, target, 1.0)).unwrap();
        let ok = leader.0 == PamKind::Epsde && test.p_value < 0.05 && test.z > 0.0;
        pass &= ok;
        notes.push(format!(
            "w={omega}: {} {:.4} vs {} {:.4} (p={:.1e})",
            leader.0, leader.1, runner_up.0, runner_up.1, test.p_value
        ));
    }
    Verdict::new(pass, notes.join("; "))
}

fn criterion_5(linear: &ExperimentOutput) -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for p in [0.8, 0.9, 1.0] {
        let (last, value) = PamKind::ADAPTIVE
            .iter()
            .map(|&pam| (pam, mean(&linear.summary, pam, TargetSpec::LinDec, p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        pass &= last == PamKind::Shade;
        notes.push(format!("p={p}: last {last} {value:.4}"));
    }
    Verdict::new(pass, notes.join("; "))
}

fn criterion_6(sin: &ExperimentOutput) -> Verdict {
    let gaps: Vec<f64> = OMEGAS
        .iter()
        .map(|&omega| {
            let target = TargetSpec::Sin { omega };
            mean(&sin.summary, PamKind::Shade, target, 0.1) - mean(&sin.summary, PamKind::Jade, target, 0.1)
        })
        .collect();
    let inv = inversions(&gaps, Direction::Increasing, true);
    Verdict::new(
        inv.is_empty(),
        format!("SHADE - JADE at p_max=0.1 over omega: [{}]", fmt_seq(&gaps)),
    )
}

fn criterion_7() -> Verdict {
    // Traces from every PAM on two targets, pooled; distance to the true target.
    let mut points = Vec::new();
    for (k, pam) in PamKind::ADAPTIVE.into_iter().enumerate() {
        for target in [TargetSpec::LinInc, TargetSpec::Sin { omega: 20.0 }] {
            let config = SimConfig {
                p_max: 1.0,
                alpha: 1.0,
                seed: 7_000 + k as u64,
                log_level: LogLevel::FullTrace,
                ..SimConfig::default()
            };
            let trace = simulate_run(pam, &PamHyper::default(), &target, &config)
                .unwrap()
                .trace
                .unwrap();
            let log = observations_from_trace(&trace, Component::C);
            let curve = target_curve(&trace, Component::C).unwrap();
            points.extend(distances(&log, &curve).unwrap());
        }
    }
    let profile = tpam::analysis::profile_from_distances(&points, DEFAULT_BINS).unwrap();
    let width = (profile.bins[0].hi - profile.bins[0].lo).max(f64::MIN_POSITIVE);
    let lo = profile.bins[0].lo;
    let n_bins = profile.bins.len();
    let mut expected = vec![0.0; n_bins];
    let mut variance = vec![0.0; n_bins];
    for &(d, _) in &points {
        let k = (((d - lo) / width) as usize).min(n_bins - 1);
        let p = (1.0 - d).max(0.0);
        expected[k] += p;
        variance[k] += p * (1.0 - p);
    }
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (k, bin) in profile.bins.iter().enumerate() {
        if bin.total < 500 {
            continue;
        }
        checked += 1;
        let z = (bin.successes as f64 - expected[k]) / variance[k].sqrt().max(1e-12);
        worst = worst.max(z.abs());
        if z.abs() > 3.0 {
            failures.push(format!("bin {k}: z={z:.2}"));
        }
    }
    Verdict::new(
        failures.is_empty() && checked > 0,
        format!(
            "{checked} bins of >= 500 samples, {} samples, max |z| = {worst:.2} {}",
            points.len(),
            failures.join(" ")
        ),
    )
}

fn oracle_sum(values: impl Iterator<Item = f64>) -> f64 {
    // Compensated (double-double) summation.
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for v in values {
        let s = hi + v;
        let bp = s - hi;
        lo += (hi - (s - bp)) + (v - bp);
        hi = s;
    }
    hi + lo
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_lehmer: f64 = 0.0;
    let mut worst_power: f64 = 0.0;
    for _ in 0..10_000 {
        let len = rng.random_range(1..=60);
        let scale = 10f64.powi(rng.random_range(-3..=0));
        let values: Vec<f64> = (0..len).map(|_| scale * rng.random_range(1e-6..=1.0)).collect();
        let lehmer = oracle_sum(values.iter().map(|v| v * v)) / oracle_sum(values.iter().copied());
        let cubes = oracle_sum(values.iter().map(|v| v * v.sqrt())) / len as f64;
        let power = (cubes * cubes).cbrt();
        worst_lehmer = worst_lehmer.max(((lehmer_mean(&values).unwrap() - lehmer) / lehmer).abs());
        worst_power = worst_power.max(((power_mean(&values).unwrap() - power) / power).abs());
    }
    Verdict::new(
        worst_lehmer <= 1e-12 && worst_power <= 1e-12,
        format!("10^4 multisets, max relative error lehmer {worst_lehmer:.1e}, power {worst_power:.1e}"),
    )
}

fn profile_line(name: &str, profile: &Option<SuccessProfile>) -> (bool, String) {
    match profile {
        None => (false, format!("{name}: no successes")),
        Some(p) => {
            let inv = p.inversions(MIN_BIN_SAMPLES);
            let probs: Vec<String> = p
                .bins
                .iter()
                .filter(|b| b.total >= MIN_BIN_SAMPLES)
                .filter_map(|b| b.probability())
                .map(|v| format!("{v:.3}"))
                .collect();
            (inv <= 1, format!("{name}: {inv} inversion(s) [{}]", probs.join(" ")))
        }
    }
}

fn criterion_9(validation: &ValidationOutput) -> Verdict {
    let cell = &validation.profiles[0];
    let (f_ok, f_line) = profile_line("F", &cell.f);
    let (c_ok, c_line) = profile_line("C", &cell.c);
    Verdict::new(f_ok && c_ok, format!("{}: {f_line}; {c_line}", cell.cell.slug()))
}

fn criterion_10(bench: &ValidationOutput) -> Verdict {
    let finals = |pam: PamKind, function: Benchmark, dim: usize| -> Vec<f64> {
        let mut v: Vec<f64> = bench
            .finals
            .iter()
            .filter(|r| r.cell.pam == pam && r.cell.function == function && r.cell.dim == dim)
            .map(|r| r.best_f)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let median = |v: &[f64]| v[v.len() / 2];
    let mut pass = true;
    let mut notes = Vec::new();
    for dim in [2, 10] {
        for pam in [PamKind::Shade, PamKind::Jade] {
            let solved = finals(pam, Benchmark::Sphere, dim)
                .iter()
                .filter(|&&v| v <= SOLVED_THRESHOLD)
                .count();
            pass &= solved >= 14;
            notes.push(format!("{pam} sphere D={dim} {solved}/15"));
        }
        let shade = median(&finals(PamKind::Shade, Benchmark::Rosenbrock, dim));
        let epsde = median(&finals(PamKind::Epsde, Benchmark::Rosenbrock, dim));
        pass &= shade <= epsde;
        notes.push(format!("rosenbrock D={dim} median shade {shade:.2e} vs epsde {epsde:.2e}"));
    }
    Verdict::new(pass, notes.join("; "))
}

fn criterion_11(dir: &Path, sin_plan: &ExperimentPlan, sin: &ExperimentOutput, bench_plan: &DePlan, bench: &ValidationOutput) -> Verdict {
    let mut rerun = sin_plan.clone();
    rerun.name = "sin_rerun".into();
    let single = RunOptions { jobs: Some(1), quiet: true };
    let again = run_experiment(&rerun, &single).unwrap();
    let mut bench_rerun = bench_plan.clone();
    bench_rerun.name = "bench_rerun".into();
    bench_rerun.out_dir = dir.to_owned();
    let bench_again = run_validation(&bench_rerun, &RunOptions { jobs: Some(3), quiet: true }).unwrap();
    let same = |a: &Path, b: &Path| fs::read(a).unwrap() == fs::read(b).unwrap();
    let checks = [
        same(&sin.dir.join("summary.csv"), &again.dir.join("summary.csv")),
        same(&sin.dir.join("runs.csv"), &again.dir.join("runs.csv")),
        same(&bench.dir.join("final_summary.csv"), &bench_again.dir.join("final_summary.csv")),
        same(&bench.dir.join("final.csv"), &bench_again.dir.join("final.csv")),
    ];
    Verdict::new(
        checks.iter().all(|&c| c),
        format!("reruns with other thread counts byte-identical: {checks:?}"),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let dir = tmp.path();
    let mut verdicts: Vec<(usize, Verdict)> = Vec::new();
    let mut report = |n: usize, v: Verdict| {
        println!("criterion {n:>2}: {} | {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        verdicts.push((n, v));
    };

    let start = Instant::now();
    let linear_plan = experiment(
        dir,
        "linear",
        vec![TargetFamily::LinInc, TargetFamily::LinDec],
        (1..=10).map(|i| i as f64 / 10.0).collect(),
    );
    let linear = run_experiment(&linear_plan, &quiet()).unwrap();
    let linear_seconds = start.elapsed().as_secs_f64();
    report(1, criterion_1(&linear, linear_seconds));

    let sin_plan = experiment(dir, "sin", vec![TargetFamily::Sin], vec![0.1, 0.5, 1.0]);
    let sin = run_experiment(&sin_plan, &quiet()).unwrap();
    report(2, criterion_2(&sin));

    let walk_plan = experiment(dir, "walk", vec![TargetFamily::RandomWalk], vec![0.1, 1.0]);
    let walk = run_experiment(&walk_plan, &quiet()).unwrap();
    report(3, criterion_3(&walk));

    report(4, criterion_4(&sin));
    report(5, criterion_5(&linear));
    report(6, criterion_6(&sin));
    report(7, criterion_7());
    report(8, criterion_8());

    let rosenbrock_plan = DePlan {
        out_dir: dir.to_owned(),
        ..DePlan::default()
    };
    let rosenbrock = run_validation(&rosenbrock_plan, &quiet()).unwrap();
    report(9, criterion_9(&rosenbrock));

    let bench_plan = DePlan {
        name: "bench".into(),
        out_dir: dir.to_owned(),
        pams: vec![PamKind::Shade, PamKind::Jade, PamKind::Epsde],
        functions: vec![Benchmark::Sphere, Benchmark::Rosenbrock],
        dims: vec![2, 10],
        stop_at_target: false,
        ..DePlan::default()
    };
    let bench = run_validation(&bench_plan, &quiet()).unwrap();
    report(10, criterion_10(&bench));
    report(11, criterion_11(dir, &sin_plan, &sin, &bench_plan, &bench));

    let failed: Vec<usize> = verdicts.iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect();
    println!(
        "acceptance: {} passed, {} failed {:?} in {:.1} s",
        verdicts.len() - failed.len(),
        failed.len(),
        failed,
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
