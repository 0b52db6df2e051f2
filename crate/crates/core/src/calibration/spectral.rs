use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math;

/// Empirical ratio between the least-squares HP λ and `½ (T/2π)⁴`.
pub const SPECTRAL_RATIO: f64 = 10.27;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralKind {
    /// Trailing mean over `window` samples.
    MovingAverage { window: usize },
    /// HP (second-order L2) smoother.
    Hp { lambda: f64 },
}

/// Squared gain of the filter at angular frequency `omega ∈ [0, π]`.
///
/// Moving average: `T⁻² |Σ_{t<T} e^{−iωt}|²`; HP: `(1 + 4λ(3 − 4cos ω + cos 2ω))⁻²`.
pub fn spectral_density(kind: SpectralKind, omega: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&omega) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: "must lie in [0, pi]",
        });
    }
    match kind {
        SpectralKind::MovingAverage { window } => {
            if window == 0 {
                return Err(Error::InvalidParameter {
                    name: "window",
                    reason: "must be at least 1",
                });
            }
            Ok(moving_average_density(window as f64, omega))
        }
        SpectralKind::Hp { lambda } => {
            if !(lambda >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "lambda",
                    reason: "must be non-negative",
                });
            }
            Ok(hp_density(lambda, omega))
        }
    }
}

fn moving_average_density(t: f64, omega: f64) -> f64 {
    let half = math::sin(0.5 * omega);
    if half.abs() < 1e-12 {
        return 1.0;
    }
    let g = math::sin(0.5 * omega * t) / (t * half);
    g * g
}

fn hp_density(lambda: f64, omega: f64) -> f64 {
    let d = 1.0 + 4.0 * lambda * (3.0 - 4.0 * math::cos(omega) + math::cos(2.0 * omega));
    1.0 / (d * d)
}

/// `½ (T/2π)⁴`: HP λ whose spectral width `(2λ)^{−1/4}` equals `2π/T`.
pub fn hp_reference_lambda(window: f64) -> f64 {
    0.5 * math::powi(window / (2.0 * PI), 4)
}

/// HP λ matching a moving average of length `window`: `10.27 · ½ (T/2π)⁴`.
pub fn l2_lambda_for_window(window: f64) -> Result<f64> {
    if !(window >= 2.0) || !window.is_finite() {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "must be at least 2",
        });
    }
    Ok(SPECTRAL_RATIO * hp_reference_lambda(window))
}

fn frequency_count(window: usize) -> usize {
    (32 * window).max(4096)
}

/// Sum of squared differences between the HP and moving-average densities on a
/// uniform grid over `[0, π]`.
pub fn spectral_objective(window: usize, lambda: f64) -> f64 {
    let points = frequency_count(window);
    let t = window as f64;
    (0..points)
        .map(|k| {
            let omega = PI * k as f64 / (points - 1) as f64;
            let d = hp_density(lambda, omega) - moving_average_density(t, omega);
            d * d
        })
        .sum()
}

/// Least-squares HP λ for a moving-average window.
///
/// Scans `ln λ` over six decades around `½ (T/2π)⁴`, then refines the best
/// bracket by golden-section search.
pub fn calibrate_l2_spectral(window: usize) -> Result<f64> {
    if window < 4 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "must be at least 4",
        });
    }
    let centre = math::ln(hp_reference_lambda(window as f64));
    let f = |u: f64| spectral_objective(window, math::exp(u));
    let span = 3.0 * core::f64::consts::LN_10;
    let steps = 120;
    let grid = |k: usize| centre - span + 2.0 * span * k as f64 / steps as f64;

    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..=steps {
        let v = f(grid(k));
        if v < best_val {
            best_val = v;
            best = k;
        }
    }
    if best == 0 || best == steps {
        return Err(Error::OptimizerFailure("spectral minimum outside the scanned range"));
    }

    let (mut a, mut b) = (grid(best - 1), grid(best + 1));
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let lambda = math::exp(0.5 * (a + b));
    if !lambda.is_finite() {
        return Err(Error::OptimizerFailure("non-finite spectral optimum"));
    }
    Ok(lambda)
}
