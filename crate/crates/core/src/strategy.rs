//! Walk-forward momentum strategy: a trend estimate feeds the mean-variance
//! allocation `α = μ / (risk_aversion · σ²)`, clipped to `[α_min, α_max]`,
//! and wealth follows `W_{t+1} = W_t (1 + α (S_{t+1}/S_t − 1) + (1 − α) r_t)`.
//!
//! Trends are estimated on log prices, so every drift estimate is a per-sample
//! log return, in the same units as the variance estimator.

use alloc::vec::Vec;

use crate::banded::DiffOrder;
use crate::calibration::{cv_filter, predict_two_trend, trend_slope, CvConfig};
use crate::error::{Error, Result};
use crate::filters::hp_filter;
use crate::math;

/// Trading days per year used for annualisation.
pub const PERIODS_PER_YEAR: f64 = 260.0;

/// Variance floor applied before dividing by `σ̂²`.
pub const VARIANCE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrendModel {
    /// Slope of the trailing moving average.
    MovingAverage { window: usize },
    /// End slope of an HP fit over the trailing `window` samples.
    Hp { lambda: f64, window: usize },
    /// Cross-validated L1 trend with the local windows (T₁, T₂).
    L1Local,
    /// Cross-validated L1 trend with the global windows (T₃).
    L1Global,
    /// Two-trend predictor.
    L1TwoTrend,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    /// Product of the risk-aversion coefficient and initial wealth.
    pub risk_aversion: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Samples in the realised-variance window.
    pub vol_window: usize,
    pub trend_model: TrendModel,
    /// Windows of the L1 trend models.
    pub cv: CvConfig,
    pub initial_wealth: f64,
}

impl StrategyConfig {
    /// Long/short bounds (−1, 1), unit risk aversion, momentum CV windows and
    /// a T₃-long variance window.
    pub fn new(trend_model: TrendModel) -> Self {
        let cv = CvConfig::momentum();
        Self {
            risk_aversion: 1.0,
            alpha_min: -1.0,
            alpha_max: 1.0,
            vol_window: cv.global_test_len,
            trend_model,
            cv,
            initial_wealth: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.alpha_min <= self.alpha_max) {
            return bad("alpha_min", "must not exceed alpha_max");
        }
        if self.vol_window < 2 {
            return bad("vol_window", "must be at least 2");
        }
        if !(self.risk_aversion > 0.0) || !self.risk_aversion.is_finite() {
            return bad("risk_aversion", "must be positive");
        }
        if !(self.initial_wealth > 0.0) {
            return bad("initial_wealth", "must be positive");
        }
        match self.trend_model {
            TrendModel::MovingAverage { window: 0 } => {
                return bad("window", "moving-average window must be positive")
            }
            TrendModel::Hp { lambda, window } => {
                if !(lambda >= 0.0) {
                    return bad("lambda", "must be non-negative");
                }
                if window < 3 {
                    return bad("window", "HP window must hold at least 3 samples");
                }
            }
            TrendModel::L1Local | TrendModel::L1Global | TrendModel::L1TwoTrend => {
                self.cv.validate()?
            }
            _ => {}
        }
        Ok(())
    }

    /// Prices needed before the first allocation can be made.
    pub fn required_prices(&self) -> usize {
        let trend = match self.trend_model {
            TrendModel::MovingAverage { window } => window + 1,
            TrendModel::Hp { window, .. } => window,
            TrendModel::L1Local => self.cv.required_history(),
            TrendModel::L1Global => self.cv.global_view().required_history(),
            TrendModel::L1TwoTrend => self.cv.required_history_two_trend(),
        };
        trend.max(self.vol_window + 1)
    }
}

fn log_prices(prices: &[f64]) -> Result<Vec<f64>> {
    prices
        .iter()
        .enumerate()
        .map(|(index, p)| {
            if *p > 0.0 && p.is_finite() {
                Ok(math::ln(*p))
            } else {
                Err(Error::NonPositivePrice { index })
            }
        })
        .collect()
}

/// Drift estimate at the last price: `(MA_t − MA_{t−1})` of log prices, i.e.
/// `ln(S_t / S_{t−T}) / T`.
pub fn moving_average_trend(prices: &[f64], window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "must be positive",
        });
    }
    if prices.len() < window + 1 {
        return Err(Error::InsufficientHistory {
            needed: window + 1,
            available: prices.len(),
        });
    }
    let tail = log_prices(&prices[prices.len() - window - 1..])?;
    Ok((tail[window] - tail[0]) / window as f64)
}

/// `σ̂² = T⁻¹ Σ ln²(S_i / S_{i−1})` over the last `window` returns.
pub fn realized_vol(prices: &[f64], window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "must be positive",
        });
    }
    if prices.len() < window + 1 {
        return Err(Error::InsufficientHistory {
            needed: window + 1,
            available: prices.len(),
        });
    }
    let logs = log_prices(&prices[prices.len() - window - 1..])?;
    let ss: f64 = logs.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    Ok(ss / window as f64)
}

/// `clip(μ / (risk_aversion · σ²), α_min, α_max)`.
pub fn optimal_allocation(mu: f64, sigma2: f64, cfg: &StrategyConfig) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let raw = mu / (cfg.risk_aversion * sigma2);
    Ok(raw.clamp(cfg.alpha_min, cfg.alpha_max))
}

/// `W (1 + α (ratio − 1) + (1 − α) r)`.
pub fn step_wealth(wealth: f64, alpha: f64, price_ratio: f64, rate: f64) -> f64 {
    wealth + wealth * (alpha * (price_ratio - 1.0) + (1.0 - alpha) * rate)
}

/// Drift estimate of `model` from the log-price history up to today.
pub fn estimate_trend(log_history: &[f64], model: &TrendModel, cv: &CvConfig) -> Result<f64> {
    match *model {
        TrendModel::MovingAverage { window } => {
            let n = log_history.len();
            if n < window + 1 {
                return Err(Error::InsufficientHistory {
                    needed: window + 1,
                    available: n,
                });
            }
            Ok((log_history[n - 1] - log_history[n - 1 - window]) / window as f64)
        }
        TrendModel::Hp { lambda, window } => {
            let n = log_history.len();
            if n < window {
                return Err(Error::InsufficientHistory {
                    needed: window,
                    available: n,
                });
            }
            let fit = hp_filter(&log_history[n - window..], lambda, DiffOrder::Second)?;
            trend_slope(&fit.trend, DiffOrder::Second)
        }
        TrendModel::L1Local => {
            let tail = &log_history[log_history.len().saturating_sub(cv.required_history())..];
            let report = cv_filter(tail, cv)?;
            trend_slope(&report.fit.trend, cv.order)
        }
        TrendModel::L1Global => {
            let global = cv.global_view();
            let tail = &log_history[log_history.len().saturating_sub(global.required_history())..];
            let report = cv_filter(tail, &global)?;
            trend_slope(&report.fit.trend, cv.order)
        }
        TrendModel::L1TwoTrend => {
            let need = cv.required_history_two_trend();
            let tail = &log_history[log_history.len().saturating_sub(need)..];
            Ok(predict_two_trend(tail, cv)?.slope)
        }
    }
}

/// Risk-free rate per period: one constant or one value per price.
#[derive(Debug, Clone, PartialEq)]
pub enum Rates {
    Constant(f64),
    PerPeriod(Vec<f64>),
}

impl Rates {
    fn at(&self, t: usize) -> f64 {
        match self {
            Rates::Constant(r) => *r,
            Rates::PerPeriod(v) => v[t],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceStats {
    /// Geometric annualised return, percent.
    pub performance_pct: f64,
    /// Annualised volatility of log wealth returns, percent.
    pub volatility_pct: f64,
    pub sharpe: f64,
    /// `None` without a benchmark.
    pub information_ratio: Option<f64>,
    /// Largest decline from a running peak, percent of the peak.
    pub max_drawdown_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    /// Index of the first price at which an allocation was made.
    pub start: usize,
    /// `wealth[k]` is the wealth at price index `start + k`.
    pub wealth: Vec<f64>,
    /// Allocation chosen at each of those dates, held until the next one.
    pub allocations: Vec<f64>,
    /// Drift estimate per date (`NaN` where the estimator failed).
    pub mu: Vec<f64>,
    /// Variance estimate per date, before flooring.
    pub sigma2: Vec<f64>,
    /// Dates whose variance was floored.
    pub floored: Vec<usize>,
    /// Dates whose trend estimate failed; the previous allocation was kept.
    pub failures: Vec<usize>,
    pub stats: PerformanceStats,
}

/// Walk-forward backtest over `prices`. The allocation at index `t` uses only
/// `prices[..=t]`.
pub fn run_backtest(prices: &[f64], rates: &Rates, cfg: &StrategyConfig) -> Result<BacktestReport> {
    run_backtest_from(prices, rates, cfg, 0)
}

/// As [`run_backtest`], with the first allocation no earlier than index
/// `first`. Runs of different models can so share one evaluation period.
pub fn run_backtest_from(
    prices: &[f64],
    rates: &Rates,
    cfg: &StrategyConfig,
    first: usize,
) -> Result<BacktestReport> {
    cfg.validate()?;
    let logs = log_prices(prices)?;
    if let Rates::PerPeriod(r) = rates {
        if r.len() != prices.len() {
            return Err(Error::DimensionMismatch {
                expected: prices.len(),
                found: r.len(),
            });
        }
    }
    let needed = cfg.required_prices();
    let start = (needed - 1).max(first);
    if prices.len() < start + 2 {
        return Err(Error::InsufficientHistory {
            needed: start + 2,
            available: prices.len(),
        });
    }
    let dates = prices.len() - start;

    let mut wealth = Vec::with_capacity(dates);
    let mut allocations = Vec::with_capacity(dates);
    let mut mu = Vec::with_capacity(dates);
    let mut sigma2 = Vec::with_capacity(dates);
    let mut floored = Vec::new();
    let mut failures = Vec::new();
    let mut w = cfg.initial_wealth;
    let mut alpha_prev = 0.0;

    for t in start..prices.len() {
        wealth.push(w);
        let var = realized_vol(&prices[..=t], cfg.vol_window)?;
        sigma2.push(var);
        let var_used = if var < VARIANCE_FLOOR {
            floored.push(t);
            VARIANCE_FLOOR
        } else {
            var
        };
        let alpha = match estimate_trend(&logs[..=t], &cfg.trend_model, &cfg.cv) {
            Ok(m) => {
                mu.push(m);
                optimal_allocation(m, var_used, cfg)?
            }
            Err(e) if e.is_numerical() => {
                mu.push(f64::NAN);
                failures.push(t);
                alpha_prev
            }
            Err(e) => return Err(e),
        };
        allocations.push(alpha);
        alpha_prev = alpha;
        if t + 1 < prices.len() {
            w = step_wealth(w, alpha, prices[t + 1] / prices[t], rates.at(t));
        }
    }

    let rate = match rates {
        Rates::Constant(r) => *r,
        Rates::PerPeriod(v) => math::mean(&v[start..]),
    };
    let stats = performance_stats(&wealth, Some(&prices[start..]), rate)?;
    Ok(BacktestReport {
        start,
        wealth,
        allocations,
        mu,
        sigma2,
        floored,
        failures,
        stats,
    })
}

/// Annualised statistics of a wealth path; `benchmark` (same length) enables
/// the information ratio. Ratios with a zero denominator are reported as 0.
pub fn performance_stats(
    wealth: &[f64],
    benchmark: Option<&[f64]>,
    rate: f64,
) -> Result<PerformanceStats> {
    if wealth.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(index) = wealth.iter().position(|w| !(*w > 0.0)) {
        return Err(Error::NonPositivePrice { index });
    }
    let periods = (wealth.len() - 1) as f64;
    let growth = wealth[wealth.len() - 1] / wealth[0];
    let annual = if periods > 0.0 {
        math::powf(growth, PERIODS_PER_YEAR / periods) - 1.0
    } else {
        0.0
    };
    let returns: Vec<f64> = wealth.windows(2).map(|w| math::ln(w[1] / w[0])).collect();
    let vol = math::sample_std(&returns) * math::sqrt(PERIODS_PER_YEAR);
    let annual_rf = math::powf(1.0 + rate, PERIODS_PER_YEAR) - 1.0;
    let sharpe = if vol > 0.0 { (annual - annual_rf) / vol } else { 0.0 };

    let information_ratio = match benchmark {
        None => None,
        Some(b) => {
            if b.len() != wealth.len() {
                return Err(Error::DimensionMismatch {
                    expected: wealth.len(),
                    found: b.len(),
                });
            }
            if let Some(index) = b.iter().position(|v| !(*v > 0.0)) {
                return Err(Error::NonPositivePrice { index });
            }
            let excess: Vec<f64> = returns
                .iter()
                .zip(b.windows(2))
                .map(|(r, w)| r - math::ln(w[1] / w[0]))
                .collect();
            let tracking = math::sample_std(&excess);
            Some(if tracking > 0.0 && !excess.is_empty() {
                math::mean(&excess) * math::sqrt(PERIODS_PER_YEAR) / tracking
            } else {
                0.0
            })
        }
    };

    let mut peak = wealth[0];
    let mut drawdown: f64 = 0.0;
    for &w in wealth {
        peak = peak.max(w);
        drawdown = drawdown.max((peak - w) / peak);
    }

    Ok(PerformanceStats {
        performance_pct: 100.0 * annual,
        volatility_pct: 100.0 * vol,
        sharpe,
        information_ratio,
        max_drawdown_pct: 100.0 * drawdown,
    })
}
