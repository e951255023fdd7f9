//! Aggregation rules used to fold a set of successful parameter values into
//! a meta-parameter.

use crate::error::{Error, Result};

/// Exponent of the power mean used by MDE.
pub const POWER_MEAN_EXPONENT: f64 = 1.5;

pub fn arithmetic_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// `Σs² / Σs`.
///
/// Zero entries are accepted as long as at least one value is positive; a
/// set of all zeros has no defined Lehmer mean and is reported as a domain
/// error so the caller can decide what to store.
pub fn lehmer_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::DomainError("Lehmer mean requires finite non-negative values"));
    }
    let (num, den) = values
        .iter()
        .fold((0.0, 0.0), |(num, den), &v| (num + v * v, den + v));
    if den == 0.0 {
        return Err(Error::DomainError("Lehmer mean of an all-zero set"));
    }
    Ok(num / den)
}

/// `((1/|S|) Σ s^1.5)^(1/1.5)`.
pub fn power_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::DomainError("power mean requires finite non-negative values"));
    }
    let mean = values
        .iter()
        .map(|v| v.powf(POWER_MEAN_EXPONENT))
        .sum::<f64>()
        / values.len() as f64;
    Ok(mean.powf(POWER_MEAN_EXPONENT.recip()))
}
