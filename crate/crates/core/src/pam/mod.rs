//! Parameter adaptation methods (PAMs) extracted from five adaptive DE
//! variants, driven purely by per-sample success/failure feedback.
//!
//! A [`PamState`] produces one [`ParamSample`] per individual each
//! iteration ([`PamState::sample`]) and then consumes the success flags for
//! those samples ([`PamState::update`]). Nothing here knows about objective
//! values, so the same state machine serves both the target-tracking
//! simulation and the real DE engine.
//!
//! | kind    | sampling                                   | update                                  |
//! |---------|--------------------------------------------|-----------------------------------------|
//! | `jde`   | per-individual value, regenerated w.p. τ   | keep regenerated value only on success  |
//! | `epsde` | per-individual pool member                 | reinitialize from pool on failure       |
//! | `jade`  | Cauchy(μ_F, 0.1), Normal(μ_C, 0.1)         | μ ← (1−c)μ + c·mean (Lehmer F, arith. C)|
//! | `mde`   | as JADE                                    | μ ← (1−c)μ + c·power mean, c random     |
//! | `shade` | Cauchy/Normal around a random memory slot  | M_k ← Lehmer mean, k cycles over H      |
//! | `fixed` | constant F and C                           | none                                    |

pub mod means;
pub mod sampling;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use means::{arithmetic_mean, lehmer_mean, power_mean};
pub use sampling::{sample_cauchy_truncated, sample_normal_clamped};

/// Which control parameters a run adapts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AdaptationMode {
    /// Scale factor only.
    F,
    /// Crossover rate only.
    #[default]
    C,
    /// Both, sampled and judged as a pair.
    Pair,
}

impl AdaptationMode {
    pub fn has_f(self) -> bool {
        matches!(self, AdaptationMode::F | AdaptationMode::Pair)
    }

    pub fn has_c(self) -> bool {
        matches!(self, AdaptationMode::C | AdaptationMode::Pair)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AdaptationMode::F => "f",
            AdaptationMode::C => "c",
            AdaptationMode::Pair => "pair",
        }
    }
}

impl fmt::Display for AdaptationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdaptationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(AdaptationMode::F),
            "c" => Ok(AdaptationMode::C),
            "pair" => Ok(AdaptationMode::Pair),
            other => Err(Error::config("mode", format!("unknown mode `{other}`"))),
        }
    }
}

/// One sampled control-parameter value or pair. Components that the
/// adaptation mode does not cover are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ParamSample {
    pub f: Option<f64>,
    pub c: Option<f64>,
}

impl ParamSample {
    pub fn new(f: Option<f64>, c: Option<f64>) -> Self {
        ParamSample { f, c }
    }

    fn uniform(mode: AdaptationMode, value: f64) -> Self {
        ParamSample {
            f: mode.has_f().then_some(value),
            c: mode.has_c().then_some(value),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PamKind {
    Jde,
    Epsde,
    Jade,
    Mde,
    Shade,
    /// Constant F and C; turns the DE engine into classic DE.
    Fixed,
}

impl PamKind {
    /// The five adaptive methods, in the order they are usually reported.
    pub const ADAPTIVE: [PamKind; 5] = [
        PamKind::Jde,
        PamKind::Epsde,
        PamKind::Jade,
        PamKind::Mde,
        PamKind::Shade,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PamKind::Jde => "jde",
            PamKind::Epsde => "epsde",
            PamKind::Jade => "jade",
            PamKind::Mde => "mde",
            PamKind::Shade => "shade",
            PamKind::Fixed => "fixed",
        }
    }
}

impl fmt::Display for PamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PamKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jde" => Ok(PamKind::Jde),
            "epsde" => Ok(PamKind::Epsde),
            "jade" => Ok(PamKind::Jade),
            "mde" => Ok(PamKind::Mde),
            "shade" => Ok(PamKind::Shade),
            "fixed" => Ok(PamKind::Fixed),
            other => Err(Error::config("pam", format!("unknown PAM `{other}`"))),
        }
    }
}

/// Hyperparameters for every PAM. Each kind reads only the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PamHyper {
    /// jDE regeneration probability for F.
    pub tau_f: f64,
    /// jDE regeneration probability for C.
    pub tau_c: f64,
    /// Lower end of jDE's F regeneration range `[jde_f_min, 1]`.
    pub jde_f_min: f64,
    /// JADE learning rate `c`.
    pub learning_rate: f64,
    /// SHADE memory size `H`.
    pub memory_size: usize,
    pub f_pool: Vec<f64>,
    pub c_pool: Vec<f64>,
    /// MDE draws its F learning rate from `(0, mde_max_rate_f]` each iteration.
    pub mde_max_rate_f: f64,
    pub mde_max_rate_c: f64,
    pub cauchy_scale: f64,
    pub normal_sd: f64,
    /// Value every method starts from.
    pub initial_value: f64,
    pub fixed_f: f64,
    pub fixed_c: f64,
}

fn tenth_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl Default for PamHyper {
    fn default() -> Self {
        PamHyper {
            tau_f: 0.1,
            tau_c: 0.1,
            jde_f_min: 0.0,
            learning_rate: 0.1,
            memory_size: 10,
            f_pool: tenth_grid(),
            c_pool: tenth_grid(),
            mde_max_rate_f: 0.2,
            mde_max_rate_c: 0.1,
            cauchy_scale: 0.1,
            normal_sd: 0.1,
            initial_value: 0.5,
            fixed_f: 0.5,
            fixed_c: 0.9,
        }
    }
}

impl PamHyper {
    /// Settings recommended by each method's original authors: jDE
    /// regenerates F in `[0.1, 1]` and EPSDE draws from
    /// F-pool `{0.4, ..., 0.9}` and C-pool `{0.1, ..., 0.9}`.
    ///
    /// [`Default`] widens both ranges to `[0, 1]`, as tracking experiments
    /// require; DE runs use this preset.
    pub fn original() -> Self {
        PamHyper {
            jde_f_min: 0.1,
            f_pool: (4..=9).map(|i| i as f64 / 10.0).collect(),
            c_pool: (1..=9).map(|i| i as f64 / 10.0).collect(),
            ..PamHyper::default()
        }
    }

    /// Checks the fields `kind` actually uses.
    pub fn validate(&self, kind: PamKind) -> Result<()> {
        fn rate(name: &str, v: f64) -> Result<()> {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::config(name, format!("{v} not in (0, 1]")))
            }
        }
        fn unit(name: &str, v: f64) -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(name, format!("{v} not in [0, 1]")))
            }
        }
        fn positive(name: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(name, format!("{v} must be positive")))
            }
        }
        fn pool(name: &str, values: &[f64]) -> Result<()> {
            if values.is_empty() {
                return Err(Error::config(name, "pool is empty"));
            }
            values.iter().try_for_each(|&v| unit(name, v))
        }

        unit("initial_value", self.initial_value)?;
        match kind {
            PamKind::Jde => {
                rate("tau_f", self.tau_f)?;
                rate("tau_c", self.tau_c)?;
                unit("jde_f_min", self.jde_f_min)
            }
            PamKind::Epsde => {
                pool("f_pool", &self.f_pool)?;
                pool("c_pool", &self.c_pool)
            }
            PamKind::Jade => {
                rate("learning_rate", self.learning_rate)?;
                positive("cauchy_scale", self.cauchy_scale)?;
                positive("normal_sd", self.normal_sd)
            }
            PamKind::Mde => {
                rate("mde_max_rate_f", self.mde_max_rate_f)?;
                rate("mde_max_rate_c", self.mde_max_rate_c)?;
                positive("cauchy_scale", self.cauchy_scale)?;
                positive("normal_sd", self.normal_sd)
            }
            PamKind::Shade => {
                if self.memory_size == 0 {
                    return Err(Error::config("memory_size", "H must be at least 1"));
                }
                positive("cauchy_scale", self.cauchy_scale)?;
                positive("normal_sd", self.normal_sd)
            }
            PamKind::Fixed => {
                unit("fixed_f", self.fixed_f)?;
                unit("fixed_c", self.fixed_c)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Adaptation {
    Jde {
        committed: Vec<ParamSample>,
        tentative: Vec<ParamSample>,
    },
    Epsde {
        assigned: Vec<ParamSample>,
    },
    Jade {
        mu_f: f64,
        mu_c: f64,
    },
    Mde {
        mu_f: f64,
        mu_c: f64,
    },
    Shade {
        memory_f: Vec<f64>,
        memory_c: Vec<f64>,
        /// Zero-based slot to overwrite next.
        next: usize,
    },
    Fixed,
}

/// Adaptation state of one PAM for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct PamState {
    kind: PamKind,
    mode: AdaptationMode,
    size: usize,
    hyper: PamHyper,
    adaptation: Adaptation,
}

/// Meta-parameter values at one point in time, with column labels.
#[derive(Clone, Debug, PartialEq)]
pub struct MetaSnapshot {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl PamState {
    /// Builds the initial state for `size` individuals.
    pub fn new(kind: PamKind, hyper: PamHyper, size: usize, mode: AdaptationMode) -> Result<Self> {
        if size == 0 {
            return Err(Error::config("n", "population size must be at least 1"));
        }
        hyper.validate(kind)?;
        let init = hyper.initial_value;
        let adaptation = match kind {
            PamKind::Jde => Adaptation::Jde {
                committed: vec![ParamSample::uniform(mode, init); size],
                tentative: vec![ParamSample::uniform(mode, init); size],
            },
            PamKind::Epsde => {
                // Start from the pool member nearest to the initial value so
                // that assignments are always pool members.
                let f = mode.has_f().then(|| nearest(&hyper.f_pool, init));
                let c = mode.has_c().then(|| nearest(&hyper.c_pool, init));
                Adaptation::Epsde {
                    assigned: vec![ParamSample { f, c }; size],
                }
            }
            PamKind::Jade => Adaptation::Jade {
                mu_f: init.max(f64::MIN_POSITIVE),
                mu_c: init,
            },
            PamKind::Mde => Adaptation::Mde {
                mu_f: init.max(f64::MIN_POSITIVE),
                mu_c: init,
            },
            PamKind::Shade => Adaptation::Shade {
                memory_f: vec![init; hyper.memory_size],
                memory_c: vec![init; hyper.memory_size],
                next: 0,
            },
            PamKind::Fixed => Adaptation::Fixed,
        };
        Ok(PamState {
            kind,
            mode,
            size,
            hyper,
            adaptation,
        })
    }

    pub fn kind(&self) -> PamKind {
        self.kind
    }

    pub fn mode(&self) -> AdaptationMode {
        self.mode
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn hyper(&self) -> &PamHyper {
        &self.hyper
    }

    /// `(μ_F, μ_C)` for JADE and MDE.
    pub fn mu(&self) -> Option<(f64, f64)> {
        match self.adaptation {
            Adaptation::Jade { mu_f, mu_c } | Adaptation::Mde { mu_f, mu_c } => Some((mu_f, mu_c)),
            _ => None,
        }
    }

    /// `(M^F, M^C)` for SHADE.
    pub fn memory(&self) -> Option<(&[f64], &[f64])> {
        match &self.adaptation {
            Adaptation::Shade {
                memory_f, memory_c, ..
            } => Some((memory_f, memory_c)),
            _ => None,
        }
    }

    /// SHADE's one-based write index `k`.
    pub fn memory_index(&self) -> Option<usize> {
        match self.adaptation {
            Adaptation::Shade { next, .. } => Some(next + 1),
            _ => None,
        }
    }

    /// Committed per-individual values for jDE and EPSDE.
    pub fn individuals(&self) -> Option<&[ParamSample]> {
        match &self.adaptation {
            Adaptation::Jde { committed, .. } => Some(committed),
            Adaptation::Epsde { assigned } => Some(assigned),
            _ => None,
        }
    }

    /// Draws one sample per individual.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<ParamSample> {
        let mut out = Vec::with_capacity(self.size);
        self.sample_into(rng, &mut out);
        out
    }

    /// Like [`sample`](Self::sample) but reuses `out`.
    ///
    /// Random numbers are consumed individual by individual, F before C.
    pub fn sample_into<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut Vec<ParamSample>) {
        out.clear();
        let mode = self.mode;
        let hyper = &self.hyper;
        match &mut self.adaptation {
            Adaptation::Jde {
                committed,
                tentative,
            } => {
                for (kept, trial) in committed.iter().zip(tentative.iter_mut()) {
                    let f = kept.f.map(|v| regenerate(v, hyper.tau_f, hyper.jde_f_min, rng));
                    let c = kept.c.map(|v| regenerate(v, hyper.tau_c, 0.0, rng));
                    *trial = ParamSample { f, c };
                    out.push(*trial);
                }
            }
            Adaptation::Epsde { assigned } => out.extend_from_slice(assigned),
            Adaptation::Jade { mu_f, mu_c } | Adaptation::Mde { mu_f, mu_c } => {
                let (mu_f, mu_c) = (*mu_f, *mu_c);
                for _ in 0..self.size {
                    out.push(draw_pair(mode, hyper, mu_f, mu_c, rng));
                }
            }
            Adaptation::Shade {
                memory_f, memory_c, ..
            } => {
                let h = memory_f.len();
                for _ in 0..self.size {
                    let r = rng.random_range(0..h);
                    out.push(draw_pair(mode, hyper, memory_f[r], memory_c[r], rng));
                }
            }
            Adaptation::Fixed => {
                let s = ParamSample {
                    f: mode.has_f().then_some(hyper.fixed_f),
                    c: mode.has_c().then_some(hyper.fixed_c),
                };
                out.resize(self.size, s);
            }
        }
    }

    /// Feeds back the success flags for the most recent samples.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        samples: &[ParamSample],
        success: &[bool],
        rng: &mut R,
    ) -> Result<()> {
        for len in [samples.len(), success.len()] {
            if len != self.size {
                return Err(Error::LengthMismatch {
                    expected: self.size,
                    actual: len,
                });
            }
        }
        let mode = self.mode;
        let hyper = &self.hyper;
        match &mut self.adaptation {
            Adaptation::Jde {
                committed,
                tentative,
            } => {
                for ((kept, trial), &ok) in committed.iter_mut().zip(tentative.iter()).zip(success) {
                    if ok {
                        *kept = *trial;
                    }
                }
            }
            Adaptation::Epsde { assigned } => {
                for (slot, &ok) in assigned.iter_mut().zip(success) {
                    if !ok {
                        // A failed pair is reinitialized as a whole.
                        if mode.has_f() {
                            slot.f = Some(pick(&hyper.f_pool, rng));
                        }
                        if mode.has_c() {
                            slot.c = Some(pick(&hyper.c_pool, rng));
                        }
                    }
                }
            }
            Adaptation::Jade { mu_f, mu_c } => {
                let (s_f, s_c) = successful(samples, success);
                let c = hyper.learning_rate;
                if let Ok(m) = lehmer_mean(&s_f) {
                    *mu_f = (1.0 - c) * *mu_f + c * m;
                }
                if let Ok(m) = arithmetic_mean(&s_c) {
                    *mu_c = (1.0 - c) * *mu_c + c * m;
                }
            }
            Adaptation::Mde { mu_f, mu_c } => {
                let (s_f, s_c) = successful(samples, success);
                // Learning rates are redrawn every iteration, used or not.
                let c_f = mode.has_f().then(|| open_closed(hyper.mde_max_rate_f, rng));
                let c_c = mode.has_c().then(|| open_closed(hyper.mde_max_rate_c, rng));
                if let (Some(c), Ok(m)) = (c_f, power_mean(&s_f)) {
                    *mu_f = (1.0 - c) * *mu_f + c * m;
                }
                if let (Some(c), Ok(m)) = (c_c, power_mean(&s_c)) {
                    *mu_c = (1.0 - c) * *mu_c + c * m;
                }
            }
            Adaptation::Shade {
                memory_f,
                memory_c,
                next,
            } => {
                if success.iter().any(|&ok| ok) {
                    let (s_f, s_c) = successful(samples, success);
                    if !s_f.is_empty() {
                        memory_f[*next] = lehmer_or_zero(&s_f);
                    }
                    if !s_c.is_empty() {
                        memory_c[*next] = lehmer_or_zero(&s_c);
                    }
                    *next = (*next + 1) % memory_f.len();
                }
            }
            Adaptation::Fixed => {}
        }
        Ok(())
    }

    /// Current meta-parameters, F components first.
    ///
    /// JADE/MDE report μ, SHADE reports every memory slot, jDE/EPSDE report
    /// the population mean of their committed values.
    pub fn meta_snapshot(&self) -> MetaSnapshot {
        let mut labels = Vec::new();
        let mut values = Vec::new();
        let mut push = |label: String, value: f64| {
            labels.push(label);
            values.push(value);
        };
        let mode = self.mode;
        match &self.adaptation {
            Adaptation::Jde { committed: v, .. } | Adaptation::Epsde { assigned: v } => {
                let n = v.len() as f64;
                if mode.has_f() {
                    push("mean_f".into(), v.iter().filter_map(|s| s.f).sum::<f64>() / n);
                }
                if mode.has_c() {
                    push("mean_c".into(), v.iter().filter_map(|s| s.c).sum::<f64>() / n);
                }
            }
            Adaptation::Jade { mu_f, mu_c } | Adaptation::Mde { mu_f, mu_c } => {
                if mode.has_f() {
                    push("mu_f".into(), *mu_f);
                }
                if mode.has_c() {
                    push("mu_c".into(), *mu_c);
                }
            }
            Adaptation::Shade {
                memory_f, memory_c, ..
            } => {
                if mode.has_f() {
                    for (i, &m) in memory_f.iter().enumerate() {
                        push(format!("m_f_{}", i + 1), m);
                    }
                }
                if mode.has_c() {
                    for (i, &m) in memory_c.iter().enumerate() {
                        push(format!("m_c_{}", i + 1), m);
                    }
                }
            }
            Adaptation::Fixed => {}
        }
        MetaSnapshot { labels, values }
    }
}

#[inline]
fn regenerate<R: Rng + ?Sized>(current: f64, tau: f64, lower: f64, rng: &mut R) -> f64 {
    if rng.random::<f64>() < tau {
        lower + (1.0 - lower) * rng.random::<f64>()
    } else {
        current
    }
}

#[inline]
fn draw_pair<R: Rng + ?Sized>(
    mode: AdaptationMode,
    hyper: &PamHyper,
    loc_f: f64,
    loc_c: f64,
    rng: &mut R,
) -> ParamSample {
    let f = mode
        .has_f()
        .then(|| sample_cauchy_truncated(loc_f, hyper.cauchy_scale, rng));
    let c = mode
        .has_c()
        .then(|| sample_normal_clamped(loc_c, hyper.normal_sd, rng));
    ParamSample { f, c }
}

fn pick<R: Rng + ?Sized>(pool: &[f64], rng: &mut R) -> f64 {
    pool[rng.random_range(0..pool.len())]
}

fn nearest(pool: &[f64], value: f64) -> f64 {
    pool.iter()
        .copied()
        .min_by(|a, b| (a - value).abs().total_cmp(&(b - value).abs()))
        .expect("pool validated nonempty")
}

/// Uniform on `(0, max]`.
fn open_closed<R: Rng + ?Sized>(max: f64, rng: &mut R) -> f64 {
    max * (1.0 - rng.random::<f64>())
}

fn successful(samples: &[ParamSample], success: &[bool]) -> (Vec<f64>, Vec<f64>) {
    let mut s_f = Vec::new();
    let mut s_c = Vec::new();
    for (s, _) in samples.iter().zip(success).filter(|(_, &ok)| ok) {
        s_f.extend(s.f);
        s_c.extend(s.c);
    }
    (s_f, s_c)
}

/// A success set of clamped-to-zero C values has no Lehmer mean; its
/// natural limit is 0.
fn lehmer_or_zero(values: &[f64]) -> f64 {
    lehmer_mean(values).unwrap_or(0.0)
}
