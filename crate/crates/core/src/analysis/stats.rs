//! Per-cell descriptive statistics and the two-sample rank-sum test.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::pam::PamKind;
use crate::targets::TargetSpec;

/// Significance level used by [`compare`].
pub const SIGNIFICANCE: f64 = 0.05;

/// Identifies one grid cell of an experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellKey {
    pub pam: PamKind,
    pub target: TargetSpec,
    pub p_max: f64,
}

impl CellKey {
    fn family_rank(&self) -> u8 {
        match self.target {
            TargetSpec::Const => 0,
            TargetSpec::LinInc => 1,
            TargetSpec::LinDec => 2,
            TargetSpec::Sin { .. } => 3,
            TargetSpec::RandomWalk { .. } => 4,
        }
    }
}

impl Eq for CellKey {}

impl Ord for CellKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.pam as u8)
            .cmp(&(other.pam as u8))
            .then(self.family_rank().cmp(&other.family_rank()))
            .then(
                self.target
                    .parameter()
                    .unwrap_or(0.0)
                    .total_cmp(&other.target.parameter().unwrap_or(0.0)),
            )
            .then(self.p_max.total_cmp(&other.p_max))
    }
}

impl PartialOrd for CellKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One finished run of one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOutcome {
    pub cell: CellKey,
    pub run: u64,
    pub r_succ: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellStats {
    pub runs: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
    /// Run whose value is the median (the lower middle one for an even
    /// count, ties broken by run id).
    pub median_run: u64,
}

/// Statistics of `(run id, value)` pairs. Independent of input order.
pub fn describe(values: &[(u64, f64)]) -> Result<CellStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let n = sorted.len();
    let mean = sorted.iter().map(|v| v.1).sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2].1
    } else {
        (sorted[n / 2 - 1].1 + sorted[n / 2].1) / 2.0
    };
    let std = if n > 1 {
        let ss: f64 = sorted.iter().map(|v| (v.1 - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(CellStats {
        runs: n,
        mean,
        median,
        std,
        median_run: sorted[(n - 1) / 2].0,
    })
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExperimentSummary {
    /// Sorted by cell key.
    pub rows: Vec<(CellKey, CellStats)>,
}

impl ExperimentSummary {
    pub fn get(&self, cell: &CellKey) -> Option<&CellStats> {
        self.rows
            .binary_search_by(|(k, _)| k.cmp(cell))
            .ok()
            .map(|i| &self.rows[i].1)
    }
}

/// Groups runs by cell and describes each group.
pub fn aggregate(runs: &[RunOutcome]) -> Result<ExperimentSummary> {
    if runs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut groups: BTreeMap<CellKey, Vec<(u64, f64)>> = BTreeMap::new();
    for run in runs {
        groups.entry(run.cell).or_default().push((run.run, run.r_succ));
    }
    let rows = groups
        .into_iter()
        .map(|(cell, values)| describe(&values).map(|s| (cell, s)))
        .collect::<Result<_>>()?;
    Ok(ExperimentSummary { rows })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankSum {
    /// Mann-Whitney U of the first sample: pairs `(a, b)` with `a > b`,
    /// ties counted as one half.
    pub u: f64,
    pub z: f64,
    /// Two-sided p-value from the tie-corrected normal approximation with
    /// continuity correction.
    pub p_value: f64,
}

/// Midranks (1-based) of the pooled samples; returns the ranks and the tie
/// correction term `Σ (t³ - t)`.
fn midranks(pooled: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        let t = (end - start) as f64;
        ties += t * t * t - t;
        start = end;
    }
    (ranks, ties)
}

/// Two-sided Wilcoxon rank-sum test.
pub fn rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
    let u = rank_sum_a - na * (na + 1.0) / 2.0;

    let n = na + nb;
    let mean = na * nb / 2.0;
    let variance = na * nb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    let offset = u - mean;
    let (z, p_value) = if variance <= 0.0 || offset.abs() <= 0.5 {
        (0.0, 1.0)
    } else {
        let z = (offset - 0.5 * offset.signum()) / variance.sqrt();
        (z, erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0))
    };
    Ok(RankSum { u, z, p_value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComparisonVerdict {
    ABetter,
    BBetter,
    Tie,
}

/// Compares per-run success rates of two cells (larger is better).
pub fn compare(a: &[f64], b: &[f64]) -> Result<ComparisonVerdict> {
    compare_at(a, b, SIGNIFICANCE)
}

pub fn compare_at(a: &[f64], b: &[f64], significance: f64) -> Result<ComparisonVerdict> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let test = rank_sum(a, b)?;
    Ok(if test.p_value >= significance {
        ComparisonVerdict::Tie
    } else if test.z > 0.0 {
        ComparisonVerdict::ABetter
    } else {
        ComparisonVerdict::BBetter
    })
}
