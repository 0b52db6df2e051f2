use alloc::vec::Vec;

use super::lambda_max;
use crate::banded::DiffOrder;
use crate::error::{Error, Result};
use crate::filters::{l1_filter, FilterResult};
use crate::math;

/// Window layout of the rolling cross-validation.
///
/// Test windows of length `test_len` are laid back to back, anchored at the
/// most recent sample. Training window `k` is the `train_len` samples right
/// before test window `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    /// Training window T₁.
    pub train_len: usize,
    /// Test and forecast window T₂.
    pub test_len: usize,
    /// Global-trend test window T₃ of the two-trend model.
    pub global_test_len: usize,
    /// Training window used when calibrating the global trend.
    pub global_train_len: usize,
    /// Number of test windows used for the λ_max statistics (m).
    pub test_sets: usize,
    /// Number of training/test folds scored per grid point (p).
    pub train_sets: usize,
    /// Grid size (n).
    pub grid_size: usize,
    pub order: DiffOrder,
}

impl CvConfig {
    /// T₁ = 400, T₂ = 50, m = p = 12, 15 grid points, L1-T. T₃ = 4·T₂.
    pub fn reference() -> Self {
        Self {
            train_len: 400,
            test_len: 50,
            global_test_len: 200,
            global_train_len: 400,
            test_sets: 12,
            train_sets: 12,
            grid_size: 15,
            order: DiffOrder::Second,
        }
    }

    /// Momentum backtest windows: T₂ = 130, T₃ = 4·T₂ = 520, T₁ = 4·T₂ = 520,
    /// global training window 2·T₃, two folds.
    pub fn momentum() -> Self {
        Self {
            train_len: 520,
            test_len: 130,
            global_test_len: 520,
            global_train_len: 1040,
            test_sets: 2,
            train_sets: 2,
            grid_size: 15,
            order: DiffOrder::Second,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min = self.order.as_usize() + 1;
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if self.test_len < min {
            return bad("test_len", "test window too short for the difference order");
        }
        if self.train_len <= self.test_len {
            return bad("train_len", "training window must exceed the test window");
        }
        if self.global_train_len <= self.global_test_len {
            return bad("global_train_len", "must exceed the global test window");
        }
        if self.global_test_len < min {
            return bad("global_test_len", "too short for the difference order");
        }
        if self.test_sets == 0 || self.train_sets == 0 {
            return bad("test_sets", "fold counts must be positive");
        }
        if self.grid_size < 2 {
            return bad("grid_size", "need at least two grid points");
        }
        Ok(())
    }

    /// Samples needed by [`cv_filter`].
    pub fn required_history(&self) -> usize {
        (self.test_sets * self.test_len).max(self.train_sets * self.test_len + self.train_len)
    }

    /// The same layout with the global windows in place of the local ones.
    pub fn global_view(&self) -> Self {
        Self {
            train_len: self.global_train_len,
            test_len: self.global_test_len,
            ..*self
        }
    }

    /// Samples needed by [`predict_two_trend`].
    pub fn required_history_two_trend(&self) -> usize {
        self.required_history()
            .max(self.global_view().required_history())
    }
}

impl Default for CvConfig {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Geometric grid `λ_j = λ_lo (λ_hi/λ_lo)^{j/n}`, `j = 1..n`.
    pub grid: Vec<f64>,
    /// Total forecast error per grid point.
    pub errors: Vec<f64>,
    /// `fold_errors[j][k]`: error of fold `k` at grid point `j`.
    pub fold_errors: Vec<Vec<f64>>,
    pub lambda_star: f64,
    /// `λ_max` of each test window, most recent first.
    pub test_lambda_max: Vec<f64>,
    pub lambda_mean: f64,
    pub lambda_std: f64,
    pub lower: f64,
    pub upper: f64,
    /// Filter of the whole input at `λ*`.
    pub fit: FilterResult,
}

fn check_history(y: &[f64], needed: usize) -> Result<()> {
    if y.len() < needed {
        return Err(Error::InsufficientHistory {
            needed,
            available: y.len(),
        });
    }
    Ok(())
}

/// Linear continuation of the last fitted segment (order 2) or the last level
/// (order 1), for `h = 1..=horizon`.
pub fn forecast_trend(trend: &[f64], order: DiffOrder, horizon: usize) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: "must be positive",
        });
    }
    let last = *trend.last().ok_or(Error::EmptySeries)?;
    let slope = trend_slope(trend, order)?;
    Ok((1..=horizon).map(|h| last + h as f64 * slope).collect())
}

/// Per-sample slope at the end of a fitted trend; zero for level filters.
pub fn trend_slope(trend: &[f64], order: DiffOrder) -> Result<f64> {
    match order {
        DiffOrder::First => {
            if trend.is_empty() {
                Err(Error::EmptySeries)
            } else {
                Ok(0.0)
            }
        }
        DiffOrder::Second => match trend {
            [.., a, b] => Ok(b - a),
            _ => Err(Error::LengthTooSmall {
                len: trend.len(),
                min: 2,
            }),
        },
    }
}

/// Forecast errors of every fold at one λ, in fold order.
fn fold_errors(y: &[f64], cfg: &CvConfig, lambda: f64) -> Result<Vec<f64>> {
    let n = y.len();
    let (t1, t2) = (cfg.train_len, cfg.test_len);
    (1..=cfg.train_sets)
        .map(|k| {
            let test_start = n - k * t2;
            let train = &y[test_start - t1..test_start];
            let test = &y[test_start..test_start + t2];
            let fit = l1_filter(train, lambda, cfg.order)?;
            let forecast = forecast_trend(&fit.trend, cfg.order, t2)?;
            let sse: f64 = forecast
                .iter()
                .zip(test)
                .map(|(f, v)| (f - v) * (f - v))
                .sum();
            Ok(sse / t2 as f64)
        })
        .collect()
}

/// Total cross-validation error at an arbitrary λ, with its fold breakdown.
pub fn cv_total_error(y: &[f64], cfg: &CvConfig, lambda: f64) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    check_history(y, cfg.required_history())?;
    let folds = fold_errors(y, cfg, lambda)?;
    Ok((folds.iter().sum(), folds))
}

/// Rolling cross-validation of λ for the L1 filter of `cfg.order`.
pub fn cv_filter(y: &[f64], cfg: &CvConfig) -> Result<CvReport> {
    cfg.validate()?;
    check_history(y, cfg.required_history())?;
    let n = y.len();
    let t2 = cfg.test_len;

    let test_lambda_max = (1..=cfg.test_sets)
        .map(|i| lambda_max(&y[n - i * t2..n - (i - 1) * t2], cfg.order))
        .collect::<Result<Vec<_>>>()?;
    let lambda_mean = math::mean(&test_lambda_max);
    let lambda_std = math::sample_std(&test_lambda_max);

    let mut lower = lambda_mean - 2.0 * lambda_std;
    if !(lower > 0.0) {
        lower = (1e-6 * lambda_mean).max(f64::EPSILON);
    }
    let upper = (lambda_mean + 2.0 * lambda_std).max(lower);
    let ratio = upper / lower;
    let steps = cfg.grid_size as f64;
    let grid: Vec<f64> = (1..=cfg.grid_size)
        .map(|j| lower * math::powf(ratio, j as f64 / steps))
        .collect();

    let mut fold_table = Vec::with_capacity(grid.len());
    let mut errors = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let folds = fold_errors(y, cfg, lambda)?;
        errors.push(folds.iter().sum());
        fold_table.push(folds);
    }

    let best = errors
        .iter()
        .enumerate()
        .fold(0, |best, (j, e)| if *e < errors[best] { j } else { best });
    let lambda_star = grid[best];
    let fit = l1_filter(y, lambda_star, cfg.order)?;

    Ok(CvReport {
        grid,
        errors,
        fold_errors: fold_table,
        lambda_star,
        test_lambda_max,
        lambda_mean,
        lambda_std,
        lower,
        upper,
        fit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Local,
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoTrendPrediction {
    pub branch: Branch,
    /// Forecast of the chosen trend over its horizon (T₂ local, T₃ global).
    pub forecast: Vec<f64>,
    /// End slope of the chosen trend.
    pub slope: f64,
    /// `|y_n − x^G_n|`.
    pub deviation: f64,
    /// Sample standard deviation of `y − x^G`.
    pub sigma: f64,
    pub local: CvReport,
    pub global: CvReport,
}

/// Two-trend predictor: use the local trend while the last observation lies
/// within one standard deviation of the global trend, else the global one.
pub fn predict_two_trend(y: &[f64], cfg: &CvConfig) -> Result<TwoTrendPrediction> {
    cfg.validate()?;
    check_history(y, cfg.required_history_two_trend())?;
    let local = cv_filter(y, cfg)?;
    let global = cv_filter(y, &cfg.global_view())?;

    let residual: Vec<f64> = y.iter().zip(&global.fit.trend).map(|(a, b)| a - b).collect();
    let sigma = math::sample_std(&residual);
    let deviation = residual.last().map_or(0.0, |r| r.abs());

    let (branch, trend, horizon) = if deviation < sigma {
        (Branch::Local, &local.fit.trend, cfg.test_len)
    } else {
        (Branch::Global, &global.fit.trend, cfg.global_test_len)
    };
    let forecast = forecast_trend(trend, cfg.order, horizon)?;
    let slope = trend_slope(trend, cfg.order)?;
    Ok(TwoTrendPrediction {
        branch,
        forecast,
        slope,
        deviation,
        sigma,
        local,
        global,
    })
}
