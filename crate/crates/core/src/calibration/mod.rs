//! Choosing λ: `λ_max` and segment means, the `λ_max` scaling law, rolling
//! cross-validation with the two-trend predictor, and spectral calibration of
//! the HP filter against a moving average.

mod cv;
mod scaling;
mod spectral;

pub use cv::{
    cv_filter, cv_total_error, forecast_trend, predict_two_trend, trend_slope, Branch, CvConfig,
    CvReport, TwoTrendPrediction,
};
pub use scaling::{fit_scaling_exponent, fit_scaling_exponent_with, ScalingFit, ScalingInput};
pub use spectral::{
    calibrate_l2_spectral, hp_reference_lambda, l2_lambda_for_window, spectral_density,
    spectral_objective, SpectralKind, SPECTRAL_RATIO,
};

use crate::banded::{DiffOperator, DiffOrder, StencilOperator};
use crate::error::{Error, Result};
use crate::math;

/// `‖(DDᵀ)⁻¹Dy‖∞`: the smallest λ at which the L1 filter of this order
/// returns the least-squares line (order 2) or the mean (order 1).
pub fn lambda_max(y: &[f64], order: DiffOrder) -> Result<f64> {
    let op = DiffOperator::new(order, y.len())?;
    let nu = op.gram().solve(&op.apply(y)?)?;
    Ok(math::norm_inf(&nu))
}

/// Mean of `λ_max` over `p` contiguous equal segments; the last segment
/// absorbs the remainder.
pub fn segment_lambda(y: &[f64], p: usize, order: DiffOrder) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: "must be at least 1",
        });
    }
    let len = y.len() / p;
    let min = order.as_usize() + 1;
    if len < min {
        return Err(Error::SegmentTooShort { len, min });
    }
    let mut total = 0.0;
    for i in 0..p {
        let end = if i + 1 == p { y.len() } else { (i + 1) * len };
        total += lambda_max(&y[i * len..end], order)?;
    }
    Ok(total / p as f64)
}
