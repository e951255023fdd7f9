//! Mutation, crossover, bound repair and selection.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    pub fitness: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// `x_r1 + F(x_r2 - x_r3)`
    Rand1,
    /// `x_r1 + F(x_r2 - x_r3) + F(x_r4 - x_r5)`
    Rand2,
    /// `x_best + F(x_r1 - x_r2)`
    Best1,
    /// `x_best + F(x_r1 - x_r2) + F(x_r3 - x_r4)`
    Best2,
    /// `x_i + F(x_r1 - x_i) + F(x_r2 - x_r3)`
    CurrentToRand1,
    /// `x_i + F(x_best - x_i) + F(x_r1 - x_r2)`
    CurrentToBest1,
    /// `x_i + F(x_pbest - x_i) + F(x_r1 - x̃_r2)`, x̃ drawn from population ∪ archive
    CurrentToPbest1,
    /// `x_r1 + F(x_pbest - x_r1) + F(x_r2 - x̃_r3)`, x̃ drawn from population ∪ archive
    RandToPbest1,
}

impl Mutation {
    pub const ALL: [Mutation; 8] = [
        Mutation::Rand1,
        Mutation::Rand2,
        Mutation::Best1,
        Mutation::Best2,
        Mutation::CurrentToRand1,
        Mutation::CurrentToBest1,
        Mutation::CurrentToPbest1,
        Mutation::RandToPbest1,
    ];

    /// Distinct population members (besides the target) the strategy draws.
    fn population_picks(self) -> usize {
        match self {
            Mutation::Rand1 | Mutation::CurrentToRand1 => 3,
            Mutation::Rand2 => 5,
            Mutation::Best1 | Mutation::CurrentToBest1 => 2,
            Mutation::Best2 => 4,
            Mutation::CurrentToPbest1 => 1,
            Mutation::RandToPbest1 => 2,
        }
    }

    pub fn uses_archive(self) -> bool {
        matches!(self, Mutation::CurrentToPbest1 | Mutation::RandToPbest1)
    }

    /// Smallest population for which every index draw can succeed.
    pub fn min_population(self) -> usize {
        self.population_picks() + usize::from(self.uses_archive()) + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossover {
    Binomial,
    ShuffledExponential,
}

/// Read-only view of one generation used by the mutation operators.
pub struct MutationContext<'a> {
    pub population: &'a [Individual],
    pub best: usize,
    /// Indices of the top ⌈p·N⌉ individuals.
    pub pbest: &'a [usize],
    pub archive: &'a [Vec<f64>],
}

/// `base + Σ scale · (a - b)`.
pub fn combine(base: &[f64], terms: &[(f64, &[f64], &[f64])]) -> Vec<f64> {
    let mut v = base.to_vec();
    for &(scale, a, b) in terms {
        for ((vj, aj), bj) in v.iter_mut().zip(a).zip(b) {
            *vj += scale * (aj - bj);
        }
    }
    v
}

fn distinct_indices<R: Rng + ?Sized>(n: usize, exclude: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut picked = Vec::with_capacity(k);
    while picked.len() < k {
        let r = rng.random_range(0..n);
        if r != exclude && !picked.contains(&r) {
            picked.push(r);
        }
    }
    picked
}

/// Builds the mutant for individual `i`.
pub fn mutate<R: Rng + ?Sized>(
    strategy: Mutation,
    ctx: &MutationContext<'_>,
    i: usize,
    f: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = ctx.population.len();
    if n < strategy.min_population() {
        return Err(Error::config(
            "pop_size",
            format!("{strategy:?} needs at least {} individuals, got {n}", strategy.min_population()),
        ));
    }
    let pop = |k: usize| ctx.population[k].x.as_slice();
    let r = distinct_indices(n, i, strategy.population_picks(), rng);
    let xi = pop(i);
    let best = pop(ctx.best);

    let v = match strategy {
        Mutation::Rand1 => combine(pop(r[0]), &[(f, pop(r[1]), pop(r[2]))]),
        Mutation::Rand2 => combine(
            pop(r[0]),
            &[(f, pop(r[1]), pop(r[2])), (f, pop(r[3]), pop(r[4]))],
        ),
        Mutation::Best1 => combine(best, &[(f, pop(r[0]), pop(r[1]))]),
        Mutation::Best2 => combine(best, &[(f, pop(r[0]), pop(r[1])), (f, pop(r[2]), pop(r[3]))]),
        Mutation::CurrentToRand1 => combine(xi, &[(f, pop(r[0]), xi), (f, pop(r[1]), pop(r[2]))]),
        Mutation::CurrentToBest1 => combine(xi, &[(f, best, xi), (f, pop(r[0]), pop(r[1]))]),
        Mutation::CurrentToPbest1 => {
            let pb = pop(pick_pbest(ctx, rng));
            let tail = pick_extended(ctx, i, &r, rng);
            combine(xi, &[(f, pb, xi), (f, pop(r[0]), tail)])
        }
        Mutation::RandToPbest1 => {
            let pb = pop(pick_pbest(ctx, rng));
            let base = pop(r[0]);
            let tail = pick_extended(ctx, i, &r, rng);
            combine(base, &[(f, pb, base), (f, pop(r[1]), tail)])
        }
    };
    Ok(v)
}

fn pick_pbest<R: Rng + ?Sized>(ctx: &MutationContext<'_>, rng: &mut R) -> usize {
    ctx.pbest[rng.random_range(0..ctx.pbest.len())]
}

/// A member of population ∪ archive distinct from `i` and the population
/// picks already made.
fn pick_extended<'a, R: Rng + ?Sized>(
    ctx: &'a MutationContext<'_>,
    i: usize,
    used: &[usize],
    rng: &mut R,
) -> &'a [f64] {
    let n = ctx.population.len();
    loop {
        let r = rng.random_range(0..n + ctx.archive.len());
        if r >= n {
            return &ctx.archive[r - n];
        }
        if r != i && !used.contains(&r) {
            return &ctx.population[r].x;
        }
    }
}

/// Binomial crossover with an explicit `j_r` and a source of uniform draws,
/// one per dimension.
pub fn binomial_with(
    parent: &[f64],
    mutant: &[f64],
    c: f64,
    j_rand: usize,
    mut draw: impl FnMut() -> f64,
) -> Vec<f64> {
    parent
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&x, &v))| {
            // U[0,1) < C takes the mutant with probability exactly C.
            let take = draw() < c;
            if take || j == j_rand {
                v
            } else {
                x
            }
        })
        .collect()
}

pub fn crossover_binomial<R: Rng + ?Sized>(parent: &[f64], mutant: &[f64], c: f64, rng: &mut R) -> Vec<f64> {
    let j_rand = rng.random_range(0..parent.len());
    binomial_with(parent, mutant, c, j_rand, || rng.random::<f64>())
}

/// Exponential crossover over a given dimension order: copy `order[start]`,
/// then keep copying the following positions (cyclically) while draws fall
/// below `c`, at most `D` components in total.
pub fn exponential_with(
    parent: &[f64],
    mutant: &[f64],
    c: f64,
    order: &[usize],
    start: usize,
    mut draw: impl FnMut() -> f64,
) -> Vec<f64> {
    let d = parent.len();
    let mut u = parent.to_vec();
    let mut copied = 0;
    loop {
        let j = order[(start + copied) % d];
        u[j] = mutant[j];
        copied += 1;
        if copied == d || draw() >= c {
            return u;
        }
    }
}

pub fn crossover_shuffled_exponential<R: Rng + ?Sized>(
    parent: &[f64],
    mutant: &[f64],
    c: f64,
    rng: &mut R,
) -> Vec<f64> {
    let d = parent.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(rng);
    let start = rng.random_range(0..d);
    exponential_with(parent, mutant, c, &order, start, || rng.random::<f64>())
}

/// Pulls out-of-bounds components to the midpoint between the violated
/// bound and the parent's component.
pub fn repair_bounds(trial: &mut [f64], parent: &[f64], bounds: &[(f64, f64)]) {
    for ((u, &x), &(lo, hi)) in trial.iter_mut().zip(parent).zip(bounds) {
        if *u < lo {
            *u = (lo + x) / 2.0;
        } else if *u > hi {
            *u = (hi + x) / 2.0;
        }
    }
}

/// One-to-one survivor selection; the trial wins ties.
pub fn select(parent: Individual, trial: Individual) -> (Individual, bool) {
    if trial.fitness <= parent.fitness {
        (trial, true)
    } else {
        (parent, false)
    }
}
