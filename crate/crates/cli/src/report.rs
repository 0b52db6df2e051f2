//! JSON report documents. Field names are part of the command-line contract.

use l1trend_core::calibration::CvReport;
use l1trend_core::strategy::PerformanceStats;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct CvSummary {
    pub order: u8,
    pub lambda_star: f64,
    pub grid: Vec<f64>,
    pub errors: Vec<f64>,
    pub lambda_mean: f64,
    pub lambda_std: f64,
    pub lower: f64,
    pub upper: f64,
    /// λ_max per test window, most recent first.
    pub test_lambda_max: Vec<f64>,
}

impl CvSummary {
    pub fn new(order: u8, r: &CvReport) -> Self {
        Self {
            order,
            lambda_star: r.lambda_star,
            grid: r.grid.clone(),
            errors: r.errors.clone(),
            lambda_mean: r.lambda_mean,
            lambda_std: r.lambda_std,
            lower: r.lower,
            upper: r.upper,
            test_lambda_max: r.test_lambda_max.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Solver {
    pub iterations: usize,
    pub duality_gap: f64,
    pub kkt_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct ScaleEntry {
    pub mean: f64,
    pub std_dev: f64,
}

#[derive(Debug, Serialize)]
pub struct FilterReport {
    pub kind: &'static str,
    pub samples: usize,
    pub inputs: usize,
    /// "explicit", "auto" or "lambda-max-fraction".
    pub lambda_source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<Solver>,
    /// Difference order used to locate breaks.
    pub break_order: u8,
    pub breaks: Vec<usize>,
    pub break_stamps: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cv: Vec<CvSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardization: Option<Vec<ScaleEntry>>,
}

#[derive(Debug, Serialize)]
pub struct CalibrateReport {
    pub samples: usize,
    pub train_len: usize,
    pub test_len: usize,
    pub test_sets: usize,
    pub train_sets: usize,
    pub grid_size: usize,
    #[serde(flatten)]
    pub cv: CvSummary,
    /// `fold_errors[j][k]`: fold `k` at grid point `j`.
    pub fold_errors: Vec<Vec<f64>>,
    pub breaks: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub model: u8,
    pub n: usize,
    pub p: f64,
    pub b: f64,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub seed: u64,
    /// Steps at which the regime variable was redrawn.
    pub switches: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct Stats {
    pub performance_pct: f64,
    pub volatility_pct: f64,
    pub sharpe: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub information_ratio: Option<f64>,
    pub max_drawdown_pct: f64,
}

impl From<PerformanceStats> for Stats {
    fn from(s: PerformanceStats) -> Self {
        Self {
            performance_pct: s.performance_pct,
            volatility_pct: s.volatility_pct,
            sharpe: s.sharpe,
            information_ratio: s.information_ratio,
            max_drawdown_pct: s.max_drawdown_pct,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Windows {
    pub order: u8,
    pub train_len: usize,
    pub test_len: usize,
    pub global_test_len: usize,
    pub global_train_len: usize,
    pub test_sets: usize,
    pub train_sets: usize,
    pub grid_size: usize,
}

#[derive(Debug, Serialize)]
pub struct BacktestReport {
    pub model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv: Option<Windows>,
    pub risk_aversion: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub vol_window: usize,
    pub initial_wealth: f64,
    /// Per-period risk-free rate used by the statistics.
    pub rate: f64,
    pub prices: usize,
    /// Index and stamp of the first allocation.
    pub start_index: usize,
    pub start: String,
    pub end: String,
    pub final_wealth: f64,
    /// Computed from the wealth column as written.
    pub stats: Stats,
    /// Buy-and-hold of the input over the same dates.
    pub benchmark: Stats,
    /// Dates whose variance estimate was floored.
    pub floored: Vec<String>,
    /// Dates whose trend estimate failed; the previous allocation was held.
    pub failures: Vec<String>,
}
