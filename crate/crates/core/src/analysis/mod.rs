//! Post-processing of experiment results.

pub mod profile;
pub mod stats;
pub mod trend;

pub use profile::{
    default_window, distances, observations_from_de, observations_from_trace, profile_from_distances,
    smoothed_success_trajectory, success_prob_vs_distance, target_curve, Component, Curve, Observation,
    ProfileBin, SuccessProfile, DEFAULT_BINS, MIN_BIN_SAMPLES,
};
pub use stats::{
    aggregate, compare, compare_at, describe, rank_sum, CellKey, CellStats, ComparisonVerdict,
    ExperimentSummary, RankSum, RunOutcome,
};
pub use trend::{inversions, trend_holds, Direction, Inversion};
