//! Bounded parameter draws shared by the Cauchy/normal based methods.

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Normal};

/// Redraw budget for non-positive Cauchy draws before falling back to the
/// location.
pub const MAX_CAUCHY_REDRAWS: usize = 100;

/// Applies the truncation/regeneration rule to a stream of raw Cauchy draws.
///
/// Draws above 1 become 1, draws at or below 0 are discarded and the next
/// draw is taken. After [`MAX_CAUCHY_REDRAWS`] rejected draws the location,
/// clamped into `(0, 1]`, is returned.
pub fn truncate_cauchy_draws(location: f64, mut draw: impl FnMut() -> f64) -> f64 {
    for _ in 0..=MAX_CAUCHY_REDRAWS {
        let value = draw();
        if value > 1.0 {
            return 1.0;
        }
        if value > 0.0 {
            return value;
        }
    }
    location.clamp(f64::MIN_POSITIVE, 1.0)
}

/// Replaces an out-of-range value with the closest limit of `[0, 1]`.
#[inline]
pub fn clamp_unit(value: f64) -> f64 {
    value.clamp(0.0, 1.0)
}

/// Cauchy draw in `(0, 1]`.
pub fn sample_cauchy_truncated<R: Rng + ?Sized>(location: f64, scale: f64, rng: &mut R) -> f64 {
    let cauchy = Cauchy::new(location, scale).expect("scale validated as positive");
    truncate_cauchy_draws(location, || cauchy.sample(rng))
}

/// Normal draw clamped into `[0, 1]`.
pub fn sample_normal_clamped<R: Rng + ?Sized>(mean: f64, sd: f64, rng: &mut R) -> f64 {
    let normal = Normal::new(mean, sd).expect("sd validated as positive");
    clamp_unit(normal.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scripted(draws: &[f64]) -> impl FnMut() -> f64 + '_ {
        let mut it = draws.iter();
        move || *it.next().expect("script exhausted")
    }

    #[test]
    fn cauchy_truncation_rules() {
        assert_eq!(truncate_cauchy_draws(0.5, scripted(&[1.4])), 1.0);
        assert_eq!(truncate_cauchy_draws(0.5, scripted(&[-0.2, 0.3])), 0.3);
        assert_eq!(truncate_cauchy_draws(0.5, scripted(&[0.5])), 0.5);
        assert_eq!(truncate_cauchy_draws(0.5, scripted(&[0.0, 1.0])), 1.0);
    }

    #[test]
    fn cauchy_redraw_cap_falls_back_to_location() {
        let mut calls = 0;
        let value = truncate_cauchy_draws(0.25, || {
            calls += 1;
            -1.0
        });
        assert_eq!(value, 0.25);
        assert_eq!(calls, MAX_CAUCHY_REDRAWS + 1);

        let value = truncate_cauchy_draws(-3.0, || -1.0);
        assert!(value > 0.0 && value <= 1.0);
    }

    #[test]
    fn normal_clamp_rules() {
        assert_eq!(clamp_unit(1.13), 1.0);
        assert_eq!(clamp_unit(-0.05), 0.0);
        assert_eq!(clamp_unit(0.45), 0.45);
    }

    #[test]
    fn randomized_draws_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..200_000 {
            let loc = (i % 11) as f64 / 10.0;
            let f = sample_cauchy_truncated(loc, 0.1, &mut rng);
            assert!(f > 0.0 && f <= 1.0, "{f}");
            let c = sample_normal_clamped(loc, 0.1, &mut rng);
            assert!((0.0..=1.0).contains(&c), "{c}");
        }
    }
}
