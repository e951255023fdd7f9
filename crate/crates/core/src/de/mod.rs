//! A small generational DE whose F and C come from a pluggable PAM.
//!
//! The engine exists to check the simulation's modelling assumption against
//! real search: every generation's (F, C) samples and their success flags
//! are recorded in a [`DeTrace`].

pub mod benchmark;
pub mod operators;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pam::{AdaptationMode, PamHyper, PamKind, PamState};
pub use benchmark::{evaluate_benchmark, Benchmark};
pub use operators::{
    crossover_binomial, crossover_shuffled_exponential, mutate, repair_bounds, select, Crossover,
    Individual, Mutation, MutationContext,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub dim: usize,
    pub pop_size: usize,
    pub max_evals: usize,
    pub mutation: Mutation,
    pub crossover: Crossover,
    /// Fraction of the population eligible as `pbest`.
    pub p_best: f64,
    pub archive_size: usize,
    /// `(lo, hi)` per dimension.
    pub bounds: Vec<(f64, f64)>,
    pub pam: PamKind,
    pub hyper: PamHyper,
    pub seed: u64,
    /// Stop as soon as the best fitness reaches this value.
    #[serde(default)]
    pub target_fitness: Option<f64>,
}

/// Population size rule: 20 up to three dimensions, `5·D` from five.
pub fn default_pop_size(dim: usize) -> usize {
    if dim <= 3 {
        20
    } else {
        (5 * dim).max(20)
    }
}

impl DeConfig {
    /// Defaults for a benchmark run: current-to-pbest/1/bin, p = 0.05,
    /// |A| = N, `10^4 · D` evaluations in `[-5, 5]^D`, and each PAM's
    /// originally recommended hyperparameters.
    pub fn new(dim: usize, pam: PamKind, seed: u64) -> Self {
        let pop_size = default_pop_size(dim);
        DeConfig {
            dim,
            pop_size,
            max_evals: 10_000 * dim,
            mutation: Mutation::CurrentToPbest1,
            crossover: Crossover::Binomial,
            p_best: 0.05,
            archive_size: pop_size,
            bounds: vec![(-5.0, 5.0); dim],
            pam,
            hyper: PamHyper::original(),
            seed,
            target_fitness: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("dim", "must be at least 1"));
        }
        let min = self.mutation.min_population().max(4);
        if self.pop_size < min {
            return Err(Error::config(
                "pop_size",
                format!("{:?} needs at least {min} individuals", self.mutation),
            ));
        }
        if self.bounds.len() != self.dim {
            return Err(Error::config(
                "bounds",
                format!("{} bounds for {} dimensions", self.bounds.len(), self.dim),
            ));
        }
        if let Some((lo, hi)) = self.bounds.iter().find(|(lo, hi)| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::config("bounds", format!("empty interval [{lo}, {hi}]")));
        }
        if !(self.p_best > 0.0 && self.p_best <= 1.0) {
            return Err(Error::config("p_best", format!("{} not in (0, 1]", self.p_best)));
        }
        if self.p_best * (self.pop_size as f64) < 1.0 - 1e-12 {
            return Err(Error::config("p_best", "p_best · pop_size must be at least 1"));
        }
        if self.max_evals < self.pop_size {
            return Err(Error::config("max_evals", "budget smaller than the initial population"));
        }
        self.hyper.validate(self.pam)
    }

    fn pbest_count(&self) -> usize {
        ((self.p_best * self.pop_size as f64).ceil() as usize).clamp(1, self.pop_size)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationRecord {
    pub t: usize,
    /// Best fitness after this generation's selection.
    pub best_f: f64,
    /// `(F, C)` per individual.
    pub samples: Vec<(f64, f64)>,
    pub success: Vec<bool>,
    /// Archive size after this generation.
    pub archive_len: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeTrace {
    pub generations: Vec<GenerationRecord>,
    pub evaluations: usize,
    pub best: Individual,
}

impl DeTrace {
    pub fn best_f(&self) -> f64 {
        self.best.fitness
    }
}

/// Runs DE on one of the built-in benchmarks.
pub fn run_adaptive_de(config: &DeConfig, function: Benchmark) -> Result<DeTrace> {
    run_adaptive_de_with(config, |x| function.evaluate(x))
}

/// Runs DE on an arbitrary objective.
///
/// Only whole generations are executed: the run stops once another
/// generation of `pop_size` trials would exceed `max_evals`, or after the
/// generation in which the best fitness reaches `target_fitness`.
pub fn run_adaptive_de_with<F>(config: &DeConfig, mut objective: F) -> Result<DeTrace>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let n = config.pop_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pam = PamState::new(config.pam, config.hyper.clone(), n, AdaptationMode::Pair)?;

    let mut population: Vec<Individual> = (0..n)
        .map(|_| {
            let x: Vec<f64> = config
                .bounds
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect();
            let fitness = objective(&x);
            Individual { x, fitness }
        })
        .collect();
    let mut evaluations = n;
    let mut archive: Vec<Vec<f64>> = Vec::with_capacity(config.archive_size + 1);
    let mut generations = Vec::new();
    let pbest_count = config.pbest_count();

    let reached = |best: f64| config.target_fitness.is_some_and(|target| best <= target);
    let mut best_f = population.iter().map(|p| p.fitness).fold(f64::INFINITY, f64::min);
    let mut t = 0;
    while evaluations + n <= config.max_evals && !reached(best_f) {
        t += 1;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| population[a].fitness.total_cmp(&population[b].fitness));
        let best = order[0];
        let pbest = &order[..pbest_count];

        let samples = pam.sample(&mut rng);
        let params: Vec<(f64, f64)> = samples
            .iter()
            .map(|s| (s.f.expect("pair mode"), s.c.expect("pair mode")))
            .collect();

        let trials = {
            let ctx = MutationContext {
                population: &population,
                best,
                pbest,
                archive: &archive,
            };
            params
                .iter()
                .enumerate()
                .map(|(i, &(f, c))| {
                    let parent = &population[i].x;
                    let mutant = mutate(config.mutation, &ctx, i, f, &mut rng)?;
                    let mut u = match config.crossover {
                        Crossover::Binomial => crossover_binomial(parent, &mutant, c, &mut rng),
                        Crossover::ShuffledExponential => {
                            crossover_shuffled_exponential(parent, &mutant, c, &mut rng)
                        }
                    };
                    repair_bounds(&mut u, parent, &config.bounds);
                    Ok(u)
                })
                .collect::<Result<Vec<_>>>()?
        };

        let mut success = Vec::with_capacity(n);
        for (i, u) in trials.into_iter().enumerate() {
            let fitness = objective(&u);
            evaluations += 1;
            let trial = Individual { x: u, fitness };
            let parent = std::mem::take(&mut population[i]);
            let displaced = config.mutation.uses_archive().then(|| parent.x.clone());
            let (survivor, ok) = select(parent, trial);
            population[i] = survivor;
            if let (true, Some(x)) = (ok && config.archive_size > 0, displaced) {
                archive.push(x);
                if archive.len() > config.archive_size {
                    let victim = rng.random_range(0..archive.len());
                    archive.swap_remove(victim);
                }
            }
            success.push(ok);
        }
        pam.update(&samples, &success, &mut rng)?;

        best_f = population.iter().map(|p| p.fitness).fold(f64::INFINITY, f64::min);
        generations.push(GenerationRecord {
            t,
            best_f,
            samples: params,
            success,
            archive_len: archive.len(),
        });
    }

    let best = population
        .into_iter()
        .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
        .expect("population is nonempty");
    Ok(DeTrace {
        generations,
        evaluations,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_population_rule() {
        assert_eq!(default_pop_size(2), 20);
        assert_eq!(default_pop_size(5), 25);
        assert_eq!(default_pop_size(10), 50);
    }

    #[test]
    fn sphere_2d_is_solved() {
        for pam in PamKind::ADAPTIVE {
            let trace = run_adaptive_de(&DeConfig::new(2, pam, 1), Benchmark::Sphere).unwrap();
            assert!(trace.best_f() <= 1e-8, "{pam}: {}", trace.best_f());
            assert!(trace.evaluations <= 20_000);
        }
    }

    #[test]
    fn best_f_never_increases() {
        let trace = run_adaptive_de(&DeConfig::new(5, PamKind::Shade, 3), Benchmark::Rastrigin).unwrap();
        assert!(trace
            .generations
            .windows(2)
            .all(|w| w[1].best_f <= w[0].best_f));
    }

    #[test]
    fn same_seed_same_trace() {
        let mut config = DeConfig::new(3, PamKind::Jde, 11);
        config.max_evals = 3000;
        config.crossover = Crossover::ShuffledExponential;
        let a = run_adaptive_de(&config, Benchmark::Rosenbrock).unwrap();
        let b = run_adaptive_de(&config, Benchmark::Rosenbrock).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_pam_is_classic_de() {
        let mut config = DeConfig::new(2, PamKind::Fixed, 5);
        config.mutation = Mutation::Rand1;
        let trace = run_adaptive_de(&config, Benchmark::Sphere).unwrap();
        assert!(trace
            .generations
            .iter()
            .all(|g| g.samples.iter().all(|&(f, c)| f == 0.5 && c == 0.9)));
        assert!(trace.best_f() <= 1e-8);
    }

    #[test]
    fn all_strategy_and_crossover_pairs_run() {
        for mutation in Mutation::ALL {
            for crossover in [Crossover::Binomial, Crossover::ShuffledExponential] {
                let mut config = DeConfig::new(2, PamKind::Jade, 2);
                config.mutation = mutation;
                config.crossover = crossover;
                config.max_evals = 2000;
                let trace = run_adaptive_de(&config, Benchmark::Sphere).unwrap();
                assert!(trace.best_f() < 1.0, "{mutation:?}/{crossover:?}");
                assert!(trace
                    .best
                    .x
                    .iter()
                    .all(|v| (-5.0..=5.0).contains(v)));
            }
        }
    }

    #[test]
    fn stops_at_target_fitness() {
        let mut config = DeConfig::new(2, PamKind::Jade, 4);
        config.target_fitness = Some(1e-8);
        let trace = run_adaptive_de(&config, Benchmark::Sphere).unwrap();
        let last = trace.generations.last().unwrap();
        assert!(last.best_f <= 1e-8);
        assert!(trace.generations[..trace.generations.len() - 1]
            .iter()
            .all(|g| g.best_f > 1e-8));
        assert!(trace.evaluations < config.max_evals);
    }

    #[test]
    fn invalid_configs() {
        let base = DeConfig::new(2, PamKind::Jade, 0);
        let cases = [
            DeConfig { pop_size: 3, ..base.clone() },
            DeConfig { dim: 3, ..base.clone() },
            DeConfig { p_best: 0.01, ..base.clone() },
            DeConfig { max_evals: 5, ..base.clone() },
            DeConfig { bounds: vec![(1.0, 1.0); 2], ..base.clone() },
            DeConfig { mutation: Mutation::Rand2, pop_size: 5, p_best: 0.2, ..base },
        ];
        for config in cases {
            assert!(matches!(
                run_adaptive_de(&config, Benchmark::Sphere),
                Err(Error::Config { .. })
            ));
        }
    }
}
