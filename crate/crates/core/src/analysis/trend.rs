//! Monotone-trend checks over a sequence of cell means.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A step of a sequence against the expected direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inversion {
    /// Index of the first element of the offending pair.
    pub index: usize,
    /// Size of the step against the expected direction (0 for a tie under
    /// a strict check).
    pub magnitude: f64,
}

/// Adjacent pairs that violate the trend. With `strict`, ties count as
/// violations.
pub fn inversions(values: &[f64], direction: Direction, strict: bool) -> Vec<Inversion> {
    values
        .windows(2)
        .enumerate()
        .filter_map(|(index, w)| {
            let step = match direction {
                Direction::Increasing => w[0] - w[1],
                Direction::Decreasing => w[1] - w[0],
            };
            let violated = if strict { step >= 0.0 } else { step > 0.0 };
            violated.then_some(Inversion { index, magnitude: step })
        })
        .collect()
}

/// The trend holds up to at most `max_count` inversions, each no larger
/// than `max_magnitude`.
pub fn trend_holds(inversions: &[Inversion], max_count: usize, max_magnitude: f64) -> bool {
    inversions.len() <= max_count && inversions.iter().all(|i| i.magnitude <= max_magnitude)
}
