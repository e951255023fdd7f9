//! The target-tracking simulation: a PAM samples parameters, each sample is
//! labelled successful with a probability that decays linearly with its
//! distance to the current target, and the PAM adapts on those labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pam::{AdaptationMode, PamHyper, PamKind, ParamSample, PamState};
use crate::targets::{self, TargetSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogLevel {
    #[default]
    Summary,
    FullTrace,
}

/// Distance between an (F, C) pair and its target pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairDistance {
    /// `‖Δ‖₂ / √2`, which keeps the distance in `[0, 1]`.
    #[default]
    Euclidean,
    /// `max(|ΔF|, |ΔC|)`.
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub t_max: usize,
    pub alpha: f64,
    pub p_max: f64,
    pub mode: AdaptationMode,
    pub seed: u64,
    pub log_level: LogLevel,
    /// Run `t_max - 1` iterations (the literal `while t < t_max` loop)
    /// instead of `t_max`. The denominator of `r_succ` is `t_max · N`
    /// either way.
    pub strict_pseudocode: bool,
    pub pair_distance: PairDistance,
    /// Separate target for C in pair mode; C follows the main target when
    /// absent.
    pub target_c: Option<TargetSpec>,
    /// Seed for random-walk targets. Defaults to `seed`, so every PAM run
    /// with the same seed sees the same walk instance.
    pub walk_seed: Option<u64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 50,
            t_max: 1000,
            alpha: 1.0,
            p_max: 1.0,
            mode: AdaptationMode::C,
            seed: 0,
            log_level: LogLevel::Summary,
            strict_pseudocode: false,
            pair_distance: PairDistance::Euclidean,
            target_c: None,
            walk_seed: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "must be at least 1"));
        }
        if self.t_max == 0 {
            return Err(Error::config("t_max", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("alpha", format!("{} must be positive", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.p_max) {
            return Err(Error::config("p_max", format!("{} not in [0, 1]", self.p_max)));
        }
        if let Some(spec) = &self.target_c {
            spec.validate()?;
        }
        Ok(())
    }

    /// Iterations actually executed.
    pub fn iterations(&self) -> usize {
        if self.strict_pseudocode {
            self.t_max - 1
        } else {
            self.t_max
        }
    }
}

/// One iteration of a full trace.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    /// Target per active component.
    pub target: ParamSample,
    pub samples: Vec<ParamSample>,
    pub success: Vec<bool>,
    /// Meta-parameters after this iteration's update.
    pub meta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Trace {
    pub meta_labels: Vec<String>,
    pub iterations: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub r_succ: f64,
    pub successes: u64,
    pub trace: Option<Trace>,
}

/// Derives the seed of run `run` of an experiment.
///
/// ChaCha seeding expands the 64-bit seed through a PCG stream, so
/// neighbouring seeds give unrelated streams.
pub fn run_seed(base_seed: u64, run: u64) -> u64 {
    base_seed.wrapping_add(run)
}

/// Distance of `sample` from `target` over the active components.
pub fn distance(sample: &ParamSample, target: &ParamSample, metric: PairDistance) -> f64 {
    let df = sample.f.zip(target.f).map(|(a, b)| (a - b).abs());
    let dc = sample.c.zip(target.c).map(|(a, b)| (a - b).abs());
    match (df, dc) {
        (Some(df), Some(dc)) => match metric {
            PairDistance::Euclidean => df.hypot(dc) / std::f64::consts::SQRT_2,
            PairDistance::Max => df.max(dc),
        },
        (Some(d), None) | (None, Some(d)) => d,
        (None, None) => 0.0,
    }
}

/// `max(-α d + p_max, 0)`.
#[inline]
pub fn acceptance_probability(d: f64, alpha: f64, p_max: f64) -> f64 {
    (-alpha * d + p_max).max(0.0)
}

/// `successes / (t_max · N)`.
pub fn success_rate(successes: u64, t_max: usize, n: usize) -> f64 {
    successes as f64 / (t_max as f64 * n as f64)
}

fn walk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Precomputed target trajectories for one run, per component.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetPlan {
    pub f: Option<Vec<f64>>,
    pub c: Option<Vec<f64>>,
}

impl TargetPlan {
    /// Builds the trajectories for `config`. Random walks draw from their
    /// own streams so the main sampling stream is untouched.
    pub fn build(spec: &TargetSpec, config: &SimConfig) -> Result<Self> {
        let walk_seed = config.walk_seed.unwrap_or(config.seed);
        let main = targets::trajectory(spec, config.t_max, &mut walk_rng(walk_seed, 1))?;
        let c_traj = match (&config.target_c, config.mode) {
            (Some(c_spec), AdaptationMode::Pair) => Some(targets::trajectory(
                c_spec,
                config.t_max,
                &mut walk_rng(walk_seed, 2),
            )?),
            _ => None,
        };
        Ok(match config.mode {
            AdaptationMode::F => TargetPlan {
                f: Some(main),
                c: None,
            },
            AdaptationMode::C => TargetPlan {
                f: None,
                c: Some(main),
            },
            AdaptationMode::Pair => TargetPlan {
                c: Some(c_traj.unwrap_or_else(|| main.clone())),
                f: Some(main),
            },
        })
    }

    /// Target at one-based iteration `t`.
    pub fn at(&self, t: usize) -> ParamSample {
        ParamSample {
            f: self.f.as_ref().map(|v| v[t - 1]),
            c: self.c.as_ref().map(|v| v[t - 1]),
        }
    }
}

/// Runs one simulation.
///
/// Per iteration the main random stream is consumed in a fixed order:
/// sampling for individuals 1..N, acceptance draws 1..N, then the PAM
/// update.
pub fn simulate_run(
    kind: PamKind,
    hyper: &PamHyper,
    target: &TargetSpec,
    config: &SimConfig,
) -> Result<RunResult> {
    config.validate()?;
    target.validate()?;
    let plan = TargetPlan::build(target, config)?;
    let mut pam = PamState::new(kind, hyper.clone(), config.n, config.mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let full = config.log_level == LogLevel::FullTrace;
    let mut trace = full.then(|| Trace {
        meta_labels: pam.meta_snapshot().labels,
        iterations: Vec::with_capacity(config.iterations()),
    });

    let mut samples = Vec::with_capacity(config.n);
    let mut success = vec![false; config.n];
    let mut total: u64 = 0;
    for t in 1..=config.iterations() {
        let goal = plan.at(t);
        pam.sample_into(&mut rng, &mut samples);
        for (flag, sample) in success.iter_mut().zip(&samples) {
            let d = distance(sample, &goal, config.pair_distance);
            let p = acceptance_probability(d, config.alpha, config.p_max);
            // U[0,1) < p has probability exactly p, so p = 0 never succeeds.
            *flag = rng.random::<f64>() < p;
            total += *flag as u64;
        }
        pam.update(&samples, &success, &mut rng)?;
        if let Some(trace) = trace.as_mut() {
            trace.iterations.push(IterationRecord {
                t,
                target: goal,
                samples: samples.clone(),
                success: success.clone(),
                meta: pam.meta_snapshot().values,
            });
        }
    }

    Ok(RunResult {
        r_succ: success_rate(total, config.t_max, config.n),
        successes: total,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p_max: f64) -> SimConfig {
        SimConfig {
            p_max,
            t_max: 200,
            ..SimConfig::default()
        }
    }

    #[test]
    fn acceptance_examples() {
        assert_eq!(acceptance_probability(0.0, 1.0, 1.0), 1.0);
        assert_eq!(acceptance_probability((0.3f64 - 0.7).abs(), 1.0, 0.3), 0.0);
        assert!((acceptance_probability((0.6f64 - 0.5).abs(), 1.0, 0.5) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn pair_distance_is_normalised() {
        let s = ParamSample::new(Some(1.0), Some(0.0));
        let t = ParamSample::new(Some(0.0), Some(1.0));
        assert!((distance(&s, &t, PairDistance::Euclidean) - 1.0).abs() < 1e-15);
        let s = ParamSample::new(Some(0.5), Some(0.2));
        let t = ParamSample::new(Some(0.2), Some(0.6));
        assert!((distance(&s, &t, PairDistance::Euclidean) - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert!((distance(&s, &t, PairDistance::Max) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn success_rate_examples() {
        assert_eq!(success_rate(0, 1000, 50), 0.0);
        assert_eq!(success_rate(50_000, 1000, 50), 1.0);
        assert_eq!(success_rate(25_000, 1000, 50), 0.5);
    }

    #[test]
    fn zero_p_max_never_succeeds() {
        for kind in PamKind::ADAPTIVE {
            let r = simulate_run(kind, &PamHyper::default(), &TargetSpec::LinInc, &cfg(0.0)).unwrap();
            assert_eq!(r.r_succ, 0.0, "{kind}");
        }
    }

    #[test]
    fn tiny_alpha_accepts_almost_everything() {
        let config = SimConfig {
            alpha: 1e-12,
            ..cfg(1.0)
        };
        let r = simulate_run(PamKind::Jade, &PamHyper::default(), &TargetSpec::LinDec, &config).unwrap();
        assert!(r.r_succ > 0.9999);
    }

    #[test]
    fn invalid_configs_fail_before_running() {
        let bad = [
            SimConfig { alpha: 0.0, ..cfg(1.0) },
            SimConfig { p_max: 1.5, ..cfg(1.0) },
            SimConfig { n: 0, ..cfg(1.0) },
            SimConfig { t_max: 0, ..cfg(1.0) },
        ];
        for config in bad {
            assert!(matches!(
                simulate_run(PamKind::Shade, &PamHyper::default(), &TargetSpec::LinInc, &config),
                Err(Error::Config { .. })
            ));
        }
    }

    #[test]
    fn same_seed_same_trace() {
        let config = SimConfig {
            log_level: LogLevel::FullTrace,
            seed: 42,
            mode: AdaptationMode::Pair,
            ..cfg(0.7)
        };
        let spec = TargetSpec::RandomWalk { step: 0.05 };
        for kind in PamKind::ADAPTIVE {
            let a = simulate_run(kind, &PamHyper::default(), &spec, &config).unwrap();
            let b = simulate_run(kind, &PamHyper::default(), &spec, &config).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn trace_recomputes_r_succ() {
        let config = SimConfig {
            log_level: LogLevel::FullTrace,
            ..cfg(0.6)
        };
        let r = simulate_run(PamKind::Shade, &PamHyper::default(), &TargetSpec::Sin { omega: 20.0 }, &config)
            .unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.iterations.len(), 200);
        let count: usize = trace
            .iterations
            .iter()
            .map(|it| it.success.iter().filter(|&&s| s).count())
            .sum();
        assert_eq!(count as u64, r.successes);
        assert_eq!(r.r_succ, count as f64 / (200.0 * 50.0));
        assert_eq!(trace.meta_labels.len(), 10);
        assert!(trace.iterations.iter().all(|it| it.meta.len() == 10));
    }

    #[test]
    fn strict_pseudocode_runs_one_fewer_iteration() {
        let config = SimConfig {
            log_level: LogLevel::FullTrace,
            strict_pseudocode: true,
            ..cfg(1.0)
        };
        let r = simulate_run(PamKind::Jde, &PamHyper::default(), &TargetSpec::LinInc, &config).unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.iterations.len(), 199);
        assert_eq!(r.r_succ, r.successes as f64 / (200.0 * 50.0));
    }

    #[test]
    fn walk_instance_is_shared_across_pams() {
        let config = SimConfig {
            log_level: LogLevel::FullTrace,
            seed: 9,
            ..cfg(0.5)
        };
        let spec = TargetSpec::RandomWalk { step: 0.1 };
        let targets = |kind| {
            simulate_run(kind, &PamHyper::default(), &spec, &config)
                .unwrap()
                .trace
                .unwrap()
                .iterations
                .iter()
                .map(|it| it.target.c.unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(targets(PamKind::Jade), targets(PamKind::Shade));
    }

    #[test]
    fn pair_mode_targets() {
        let config = SimConfig {
            mode: AdaptationMode::Pair,
            ..cfg(1.0)
        };
        let plan = TargetPlan::build(&TargetSpec::LinInc, &config).unwrap();
        assert_eq!(plan.at(200).f, plan.at(200).c);
        let config = SimConfig {
            target_c: Some(TargetSpec::LinDec),
            ..config
        };
        let plan = TargetPlan::build(&TargetSpec::LinInc, &config).unwrap();
        assert!((plan.at(200).f.unwrap() - 0.9).abs() < 1e-15);
        assert!((plan.at(200).c.unwrap() - 0.1).abs() < 1e-15);
    }
}
