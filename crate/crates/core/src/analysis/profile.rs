//! Success probability as a function of the distance between a sampled
//! parameter and a reference trajectory.
//!
//! For real DE runs the reference is a moving average of the successful
//! parameter values; for simulated runs it can be the true target.

use crate::de::DeTrace;
use crate::error::{Error, Result};
use crate::sim::Trace;

/// Default number of equal-width distance bins.
pub const DEFAULT_BINS: usize = 20;
/// Bins with fewer samples are reported but ignored by trend checks.
pub const MIN_BIN_SAMPLES: u64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    F,
    C,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::F => "f",
            Component::C => "c",
        }
    }
}

/// One sampled parameter value and whether it was successful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub t: usize,
    pub value: f64,
    pub success: bool,
}

/// Observations of one component from a simulation trace; empty if the
/// component was not adapted.
pub fn observations_from_trace(trace: &Trace, component: Component) -> Vec<Observation> {
    let mut out = Vec::new();
    for rec in &trace.iterations {
        for (sample, &success) in rec.samples.iter().zip(&rec.success) {
            let value = match component {
                Component::F => sample.f,
                Component::C => sample.c,
            };
            if let Some(value) = value {
                out.push(Observation { t: rec.t, value, success });
            }
        }
    }
    out
}

/// Observations of one component from a DE run.
pub fn observations_from_de(trace: &DeTrace, component: Component) -> Vec<Observation> {
    trace
        .generations
        .iter()
        .flat_map(|g| {
            g.samples.iter().zip(&g.success).map(move |(&(f, c), &success)| Observation {
                t: g.t,
                value: match component {
                    Component::F => f,
                    Component::C => c,
                },
                success,
            })
        })
        .collect()
}

/// A per-iteration curve starting at iteration `t_start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub t_start: usize,
    pub values: Vec<f64>,
}

impl Curve {
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.t_start).and_then(|k| self.values.get(k).copied())
    }

    pub fn t_end(&self) -> usize {
        self.t_start + self.values.len() - 1
    }
}

/// The true target of a simulation trace as a curve.
pub fn target_curve(trace: &Trace, component: Component) -> Result<Curve> {
    let first = trace.iterations.first().ok_or(Error::EmptyInput)?;
    let values = trace
        .iterations
        .iter()
        .map(|rec| match component {
            Component::F => rec.target.f,
            Component::C => rec.target.c,
        })
        .collect::<Option<Vec<f64>>>()
        .ok_or(Error::config("component", "not adapted in this trace"))?;
    Ok(Curve {
        t_start: first.t,
        values,
    })
}

/// Smoothing window of 5% of the iterations, at least one.
pub fn default_window(iterations: usize) -> usize {
    ((iterations as f64 * 0.05).round() as usize).max(1)
}

/// Centered moving average of the successful values.
///
/// The window around `t` spans `t - (w-1)/2 ..= t + w/2`, truncated to the
/// logged range. Iterations whose window holds no success are filled by
/// linear interpolation between the nearest defined neighbours and held
/// constant beyond the first and last defined value.
pub fn smoothed_success_trajectory(log: &[Observation], window: usize) -> Result<Curve> {
    if window == 0 {
        return Err(Error::config("window", "must be at least 1"));
    }
    let t_start = log.iter().map(|o| o.t).min().ok_or(Error::EmptyInput)?;
    let t_end = log.iter().map(|o| o.t).max().expect("nonempty");
    let len = t_end - t_start + 1;

    let mut sum = vec![0.0; len];
    let mut count = vec![0usize; len];
    for o in log.iter().filter(|o| o.success) {
        sum[o.t - t_start] += o.value;
        count[o.t - t_start] += 1;
    }
    if count.iter().all(|&c| c == 0) {
        return Err(Error::EmptyInput);
    }

    let raw: Vec<Option<f64>> = (0..len)
        .map(|k| {
            let lo = k.saturating_sub((window - 1) / 2);
            let hi = (k + window / 2).min(len - 1);
            let n: usize = count[lo..=hi].iter().sum();
            (n > 0).then(|| sum[lo..=hi].iter().sum::<f64>() / n as f64)
        })
        .collect();

    Ok(Curve {
        t_start,
        values: fill_gaps(&raw),
    })
}

fn fill_gaps(raw: &[Option<f64>]) -> Vec<f64> {
    let defined: Vec<usize> = (0..raw.len()).filter(|&k| raw[k].is_some()).collect();
    let mut out = Vec::with_capacity(raw.len());
    let mut next = 0;
    for (k, value) in raw.iter().enumerate() {
        while next < defined.len() && defined[next] < k {
            next += 1;
        }
        out.push(match value {
            Some(v) => *v,
            None if next == 0 => raw[defined[0]].unwrap(),
            None if next == defined.len() => raw[defined[next - 1]].unwrap(),
            None => {
                let (a, b) = (defined[next - 1], defined[next]);
                let (va, vb) = (raw[a].unwrap(), raw[b].unwrap());
                va + (vb - va) * (k - a) as f64 / (b - a) as f64
            }
        });
    }
    out
}

/// `(|value - curve(t)|, success)` for every observation.
pub fn distances(log: &[Observation], curve: &Curve) -> Result<Vec<(f64, bool)>> {
    log.iter()
        .map(|o| {
            curve
                .at(o.t)
                .map(|c| ((o.value - c).abs(), o.success))
                .ok_or(Error::IterationOutOfRange {
                    t: o.t,
                    t_max: curve.t_end(),
                })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileBin {
    pub lo: f64,
    pub hi: f64,
    pub successes: u64,
    pub total: u64,
    pub distance_sum: f64,
}

impl ProfileBin {
    /// `None` for an empty bin.
    pub fn probability(&self) -> Option<f64> {
        (self.total > 0).then(|| self.successes as f64 / self.total as f64)
    }

    pub fn mean_distance(&self) -> Option<f64> {
        (self.total > 0).then(|| self.distance_sum / self.total as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuccessProfile {
    pub bins: Vec<ProfileBin>,
}

impl SuccessProfile {
    /// Adjacent increases of the success probability between consecutive
    /// bins holding at least `min_samples` samples.
    pub fn inversions(&self, min_samples: u64) -> usize {
        let probs: Vec<f64> = self
            .bins
            .iter()
            .filter(|b| b.total >= min_samples)
            .filter_map(|b| b.probability())
            .collect();
        probs.windows(2).filter(|w| w[1] > w[0]).count()
    }

    pub fn is_non_increasing(&self, min_samples: u64, max_inversions: usize) -> bool {
        self.inversions(min_samples) <= max_inversions
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.total).sum()
    }
}

/// Bins `(distance, success)` points into `n_bins` equal-width bins over the
/// observed distance range.
pub fn profile_from_distances(points: &[(f64, bool)], n_bins: usize) -> Result<SuccessProfile> {
    if n_bins == 0 {
        return Err(Error::config("n_bins", "must be at least 1"));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let mut hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1e-9;
    }
    let width = (hi - lo) / n_bins as f64;
    let mut bins: Vec<ProfileBin> = (0..n_bins)
        .map(|k| ProfileBin {
            lo: lo + k as f64 * width,
            hi: if k + 1 == n_bins { hi } else { lo + (k + 1) as f64 * width },
            successes: 0,
            total: 0,
            distance_sum: 0.0,
        })
        .collect();
    for &(d, success) in points {
        let k = (((d - lo) / width) as usize).min(n_bins - 1);
        let bin = &mut bins[k];
        bin.total += 1;
        bin.successes += success as u64;
        bin.distance_sum += d;
    }
    Ok(SuccessProfile { bins })
}

pub fn success_prob_vs_distance(log: &[Observation], curve: &Curve, n_bins: usize) -> Result<SuccessProfile> {
    profile_from_distances(&distances(log, curve)?, n_bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn obs(t: usize, value: f64, success: bool) -> Observation {
        Observation { t, value, success }
    }

    #[test]
    fn constant_successes_give_constant_curve() {
        let log: Vec<_> = (1..=50)
            .flat_map(|t| [obs(t, 0.3, true), obs(t, 0.9, false)])
            .collect();
        let curve = smoothed_success_trajectory(&log, 7).unwrap();
        assert_eq!(curve.values.len(), 50);
        assert!(curve.values.iter().all(|v| (v - 0.3).abs() < 1e-12));
    }

    #[test]
    fn unit_window_is_per_iteration_mean() {
        let log = vec![obs(1, 0.2, true), obs(1, 0.4, true), obs(2, 0.9, true), obs(2, 0.1, false)];
        let curve = smoothed_success_trajectory(&log, 1).unwrap();
        assert!((curve.values[0] - 0.3).abs() < 1e-15);
        assert_eq!(curve.values[1], 0.9);
    }

    #[test]
    fn gaps_are_interpolated() {
        let log = vec![obs(1, 0.2, true), obs(2, 0.5, false), obs(3, 0.5, false), obs(4, 0.8, true), obs(6, 0.0, false)];
        let curve = smoothed_success_trajectory(&log, 1).unwrap();
        let expect = [0.2, 0.4, 0.6, 0.8, 0.8, 0.8];
        for (v, e) in curve.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    fn brute_force_window_mean(log: &[Observation], t: usize, w: usize) -> Option<f64> {
        let lo = t as i64 - ((w as i64 - 1) / 2);
        let hi = (t + w / 2) as i64;
        let hits: Vec<f64> = log
            .iter()
            .filter(|o| o.success && (o.t as i64) >= lo && (o.t as i64) <= hi)
            .map(|o| o.value)
            .collect();
        (!hits.is_empty()).then(|| hits.iter().sum::<f64>() / hits.len() as f64)
    }

    #[test]
    fn ramp_tracks_within_half_window_slope() {
        let slope = 1e-3;
        let log: Vec<_> = (1..=400).map(|t| obs(t, slope * t as f64, true)).collect();
        for w in [1, 4, 9, 20] {
            let curve = smoothed_success_trajectory(&log, w).unwrap();
            for t in 1..=400 {
                let brute = brute_force_window_mean(&log, t, w).unwrap();
                assert!((curve.at(t).unwrap() - brute).abs() < 1e-12);
                if t > w && t + w <= 400 {
                    assert!((curve.at(t).unwrap() - slope * t as f64).abs() <= slope * w as f64 / 2.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn step_success_gives_step_profile() {
        let points: Vec<(f64, bool)> = (0..=200).map(|k| (k as f64 / 1000.0, k < 100)).collect();
        let profile = profile_from_distances(&points, 2).unwrap();
        assert_eq!(profile.bins[0].probability(), Some(1.0));
        assert_eq!(profile.bins[1].probability(), Some(0.0));
        assert!(profile.bins[0].hi == profile.bins[1].lo);
    }

    #[test]
    fn empty_bins_are_flagged() {
        let points = [(0.0, true), (1.0, false)];
        let profile = profile_from_distances(&points, 4).unwrap();
        assert_eq!(profile.bins[1].probability(), None);
        assert_eq!(profile.bins[1].total, 0);
        assert_eq!(profile.bins[3].probability(), Some(0.0));
    }

    #[test]
    fn errors() {
        assert!(smoothed_success_trajectory(&[], 3).is_err());
        assert!(smoothed_success_trajectory(&[obs(1, 0.5, false)], 3).is_err());
        assert!(smoothed_success_trajectory(&[obs(1, 0.5, true)], 0).is_err());
        let curve = Curve { t_start: 1, values: vec![0.5] };
        assert!(distances(&[obs(2, 0.5, true)], &curve).is_err());
        assert!(profile_from_distances(&[], 3).is_err());
    }

    #[test]
    fn inversion_count_ignores_sparse_bins() {
        let bins = [(0.9, 100), (1.0, 5), (0.5, 100), (0.6, 100)]
            .iter()
            .enumerate()
            .map(|(k, &(p, n))| ProfileBin {
                lo: k as f64,
                hi: k as f64 + 1.0,
                successes: (p * n as f64) as u64,
                total: n,
                distance_sum: 0.0,
            })
            .collect();
        let profile = SuccessProfile { bins };
        assert_eq!(profile.inversions(20), 1);
        assert_eq!(profile.inversions(1), 2);
    }

    proptest! {
        #[test]
        fn all_successful_means_all_ones(ds in prop::collection::vec(0.0f64..1.0, 1..200), n in 1usize..30) {
            let points: Vec<_> = ds.into_iter().map(|d| (d, true)).collect();
            let profile = profile_from_distances(&points, n).unwrap();
            prop_assert_eq!(profile.total(), points.len() as u64);
            for bin in &profile.bins {
                prop_assert!(bin.lo < bin.hi);
                if let Some(p) = bin.probability() {
                    prop_assert_eq!(p, 1.0);
                }
            }
        }
    }
}
