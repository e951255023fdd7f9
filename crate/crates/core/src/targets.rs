//! Target parameter trajectories a PAM is asked to track.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TARGET_LO: f64 = 0.1;
pub const TARGET_HI: f64 = 0.9;
const AMPLITUDE: f64 = 0.4;
const OFFSET: f64 = 0.5;

/// A target function family together with its hyperparameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TargetSpec {
    /// `g(n) = 0.5`.
    Const,
    /// `g(n) = 0.4 n + 0.5`.
    LinInc,
    /// `g(n) = -0.4 n + 0.5`.
    LinDec,
    /// `g(n) = 0.4 sin(ω n) + 0.5`.
    Sin { omega: f64 },
    /// Reflected random walk starting at 0.5 with step `s · U[-1, 1]`.
    RandomWalk { step: f64 },
}

impl TargetSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TargetSpec::Sin { omega } if !(omega > 0.0 && omega.is_finite()) => {
                Err(Error::config("omega", format!("{omega} must be positive")))
            }
            TargetSpec::RandomWalk { step } if !(step > 0.0 && step <= 1.0) => {
                Err(Error::config("step", format!("{step} not in (0, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            TargetSpec::Const => "const",
            TargetSpec::LinInc => "lin_inc",
            TargetSpec::LinDec => "lin_dec",
            TargetSpec::Sin { .. } => "sin",
            TargetSpec::RandomWalk { .. } => "random_walk",
        }
    }

    /// The family's hyperparameter (ω or s), if it has one.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            TargetSpec::Sin { omega } => Some(omega),
            TargetSpec::RandomWalk { step } => Some(step),
            _ => None,
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, TargetSpec::RandomWalk { .. })
    }

    /// Closed-form value at progress `n ∈ (0, 1]`; `None` for the random walk.
    pub fn closed_form(&self, n: f64) -> Option<f64> {
        match *self {
            TargetSpec::Const => Some(OFFSET),
            TargetSpec::LinInc => Some(AMPLITUDE * n + OFFSET),
            TargetSpec::LinDec => Some(-AMPLITUDE * n + OFFSET),
            TargetSpec::Sin { omega } => Some(AMPLITUDE * (omega * n).sin() + OFFSET),
            TargetSpec::RandomWalk { .. } => None,
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(p) => write!(f, "{}({p})", self.family()),
            None => f.write_str(self.family()),
        }
    }
}

/// Mutable state of a target; only the random walk actually carries any.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetState {
    pub current: f64,
    /// Last iteration evaluated (0 before the first call).
    pub t: usize,
}

impl Default for TargetState {
    fn default() -> Self {
        TargetState {
            current: OFFSET,
            t: 0,
        }
    }
}

/// Progress `n_t = t / t_max`.
pub fn progress(t: usize, t_max: usize) -> f64 {
    t as f64 / t_max as f64
}

/// Target value at iteration `t` (one-based).
///
/// For the random walk, `state` must hold the position at `t - 1`; the
/// first iteration returns 0.5 without consuming randomness.
pub fn eval_target<R: Rng + ?Sized>(
    spec: &TargetSpec,
    state: &mut TargetState,
    t: usize,
    t_max: usize,
    rng: &mut R,
) -> Result<f64> {
    if t == 0 || t > t_max {
        return Err(Error::IterationOutOfRange { t, t_max });
    }
    let value = match *spec {
        TargetSpec::RandomWalk { step } => {
            if t == 1 {
                state.current = OFFSET;
                state.current
            } else {
                step_random_walk(state, step, rng)
            }
        }
        _ => spec
            .closed_form(progress(t, t_max))
            .expect("deterministic family"),
    };
    state.t = t;
    Ok(value)
}

/// Advances the walk by `s · U[-1, 1]`, reflecting at the bounds.
pub fn step_random_walk<R: Rng + ?Sized>(state: &mut TargetState, step: f64, rng: &mut R) -> f64 {
    let delta = rng.random_range(-1.0..=1.0);
    state.current = reflect(state.current + step * delta, TARGET_LO, TARGET_HI);
    state.current
}

/// Mirrors a value that left `[lo, hi]` back across the violated bound.
///
/// Inside `[2lo - hi, 2hi - lo]` one mirror suffices; steps above 0.8 can
/// overshoot further, so mirroring repeats until the value lands in range.
pub fn reflect(mut value: f64, lo: f64, hi: f64) -> f64 {
    loop {
        if value > hi {
            value = 2.0 * hi - value;
        } else if value < lo {
            value = 2.0 * lo - value;
        } else {
            return value;
        }
    }
}

/// The full trajectory `θ_1, ..., θ_{t_max}` (index 0 is iteration 1).
pub fn trajectory<R: Rng + ?Sized>(spec: &TargetSpec, t_max: usize, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut state = TargetState::default();
    (1..=t_max)
        .map(|t| eval_target(spec, &mut state, t, t_max, rng))
        .collect()
}
