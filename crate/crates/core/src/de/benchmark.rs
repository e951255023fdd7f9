use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classic test functions, all with optimum 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Sphere,
    Ellipsoid,
    Rosenbrock,
    Rastrigin,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [
        Benchmark::Sphere,
        Benchmark::Ellipsoid,
        Benchmark::Rosenbrock,
        Benchmark::Rastrigin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Benchmark::Sphere => "sphere",
            Benchmark::Ellipsoid => "ellipsoid",
            Benchmark::Rosenbrock => "rosenbrock",
            Benchmark::Rastrigin => "rastrigin",
        }
    }

    pub fn evaluate(self, x: &[f64]) -> f64 {
        evaluate_benchmark(self, x)
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Benchmark::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::config("function", format!("unknown benchmark `{s}`")))
    }
}

pub fn evaluate_benchmark(function: Benchmark, x: &[f64]) -> f64 {
    match function {
        Benchmark::Sphere => x.iter().map(|v| v * v).sum(),
        Benchmark::Ellipsoid => {
            let d = x.len();
            x.iter()
                .enumerate()
                .map(|(j, v)| {
                    let exponent = if d > 1 { 6.0 * j as f64 / (d - 1) as f64 } else { 0.0 };
                    10f64.powf(exponent) * v * v
                })
                .sum()
        }
        Benchmark::Rosenbrock => x
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum(),
        Benchmark::Rastrigin => {
            10.0 * x.len() as f64
                + x.iter()
                    .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                    .sum::<f64>()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optima() {
        assert_eq!(evaluate_benchmark(Benchmark::Sphere, &[0.0; 5]), 0.0);
        assert_eq!(evaluate_benchmark(Benchmark::Ellipsoid, &[0.0; 5]), 0.0);
        assert_eq!(evaluate_benchmark(Benchmark::Rosenbrock, &[1.0; 5]), 0.0);
        assert_eq!(evaluate_benchmark(Benchmark::Rastrigin, &[0.0; 5]), 0.0);
    }

    #[test]
    fn hand_values() {
        assert_eq!(evaluate_benchmark(Benchmark::Sphere, &[1.0, 2.0]), 5.0);
        // 1·1 + 10^6·1
        assert_eq!(evaluate_benchmark(Benchmark::Ellipsoid, &[1.0, 1.0]), 1_000_001.0);
        // 100·(1 - 0)² + (1 - 0)² at (0, 1)
        assert_eq!(evaluate_benchmark(Benchmark::Rosenbrock, &[0.0, 1.0]), 101.0);
        // 10·1 + 1 - 10·cos(2π) = 1
        assert!((evaluate_benchmark(Benchmark::Rastrigin, &[1.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn names_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.as_str().parse::<Benchmark>().unwrap(), b);
        }
    }
}
