use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::lambda_max;
use crate::banded::DiffOrder;
use crate::error::{Error, Result};
use crate::math;
use crate::synth::{simulate_brownian, simulate_model2, ModelParams};

/// Signal family whose `λ_max` growth is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingInput {
    /// Switching-drift random walk with these `p`, `b`, `σ` (length and seed
    /// are set per draw).
    SwitchingRandomWalk { p: f64, b: f64, sigma: f64 },
    /// Standard Brownian motion.
    Brownian,
}

impl ScalingInput {
    /// `p = 0.993, b = 5, σ = 15`.
    pub fn reference() -> Self {
        let m = ModelParams::model2_reference(0, 0);
        ScalingInput::SwitchingRandomWalk {
            p: m.p,
            b: m.b,
            sigma: m.sigma,
        }
    }

    fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match *self {
            ScalingInput::SwitchingRandomWalk { p, b, sigma } => {
                let params = ModelParams { n, p, b, sigma, theta: 1.0, seed };
                Ok(simulate_model2(&params)?.observed)
            }
            ScalingInput::Brownian => Ok(simulate_brownian(n, seed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// Slope of `ln E[λ_max]` against `ln T`.
    pub exponent: f64,
    pub intercept: f64,
    pub lengths: Vec<usize>,
    /// Monte-Carlo mean of `λ_max` per length.
    pub mean_lambda_max: Vec<f64>,
}

/// Exponent of `λ_max ∝ T^k` on the reference switching random walk.
pub fn fit_scaling_exponent(
    order: DiffOrder,
    n_sims: usize,
    lengths: &[usize],
    seed: u64,
) -> Result<ScalingFit> {
    fit_scaling_exponent_with(order, ScalingInput::reference(), n_sims, lengths, seed)
}

/// Averages `λ_max` over `n_sims` paths per length and regresses
/// `ln mean` on `ln T`. Path seeds are drawn in order from a ChaCha20 stream
/// keyed by `seed`.
pub fn fit_scaling_exponent_with(
    order: DiffOrder,
    input: ScalingInput,
    n_sims: usize,
    lengths: &[usize],
    seed: u64,
) -> Result<ScalingFit> {
    if lengths.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "lengths",
            reason: "need at least three lengths",
        });
    }
    if n_sims < 30 {
        return Err(Error::InvalidParameter {
            name: "n_sims",
            reason: "need at least 30 simulations",
        });
    }
    let mut seeds = ChaCha20Rng::seed_from_u64(seed);
    let mut mean_lambda_max = Vec::with_capacity(lengths.len());
    for &n in lengths {
        let mut total = 0.0;
        for _ in 0..n_sims {
            let y = input.sample(n, seeds.next_u64())?;
            total += lambda_max(&y, order)?;
        }
        mean_lambda_max.push(total / n_sims as f64);
    }
    let xs: Vec<f64> = lengths.iter().map(|&n| math::ln(n as f64)).collect();
    let ys: Vec<f64> = mean_lambda_max.iter().map(|&v| math::ln(v)).collect();
    let (exponent, intercept) = regress(&xs, &ys);
    Ok(ScalingFit {
        exponent,
        intercept,
        lengths: lengths.to_vec(),
        mean_lambda_max,
    })
}

/// Least-squares slope and intercept of `ys` on `xs`.
fn regress(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let xbar = math::mean(xs);
    let ybar = math::mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let slope = sxy / sxx;
    (slope, ybar - slope * xbar)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_recovers_power_law() {
        let xs: Vec<f64> = [10.0f64, 20.0, 40.0].iter().map(|v| libm::log(*v)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 * x + 0.3).collect();
        let (k, c) = regress(&xs, &ys);
        assert!((k - 1.5).abs() < 1e-12 && (c - 0.3).abs() < 1e-12);
    }

    #[test]
    fn argument_checks() {
        assert!(fit_scaling_exponent(DiffOrder::First, 50, &[10, 20], 1).is_err());
        assert!(fit_scaling_exponent(DiffOrder::First, 10, &[10, 20, 40], 1).is_err());
    }
}
