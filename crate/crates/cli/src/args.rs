use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l1trend_core::calibration::CvConfig;

use crate::config::Config;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "l1trend", version, about = "L1 trend filtering, calibration, simulation and momentum backtests")]
pub struct Cli {
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract a trend from one series (or a common trend from several).
    Filter(FilterArgs),
    /// Cross-validate λ on a rolling window layout.
    Calibrate(CalibrateArgs),
    /// Simulate one of the four regime-switching models.
    Simulate(SimulateArgs),
    /// Walk-forward momentum backtest on a price series.
    Backtest(BacktestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterKindArg {
    Hp,
    L1t,
    L1c,
    L1tc,
    #[value(name = "l1t-multi")]
    L1tMulti,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrendModelArg {
    Ma,
    Hp,
    #[value(name = "l1-local")]
    L1Local,
    #[value(name = "l1-global")]
    L1Global,
    #[value(name = "l1-two-trend")]
    L1TwoTrend,
}

macro_rules! from_str_via_value_enum {
    ($($t:ty),*) => {$(
        impl std::str::FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, true)
            }
        }
    )*};
}
from_str_via_value_enum!(FilterKindArg, TrendModelArg);

/// Rolling cross-validation windows.
#[derive(Debug, Clone, Default, Args)]
pub struct CvArgs {
    /// Training window T1.
    #[arg(long)]
    pub train_len: Option<usize>,
    /// Test window T2.
    #[arg(long)]
    pub test_len: Option<usize>,
    /// Global test window T3 (two-trend and global models).
    #[arg(long)]
    pub global_test_len: Option<usize>,
    /// Training window of the global trend.
    #[arg(long)]
    pub global_train_len: Option<usize>,
    /// Number of test windows m.
    #[arg(long)]
    pub test_sets: Option<usize>,
    /// Number of training folds p.
    #[arg(long)]
    pub train_sets: Option<usize>,
    /// Number of λ grid points n.
    #[arg(long)]
    pub grid_size: Option<usize>,
}

impl CvArgs {
    pub fn resolve(&self, cfg: &Config, base: CvConfig) -> CliResult<CvConfig> {
        Ok(CvConfig {
            train_len: cfg.pick(self.train_len, "train-len", base.train_len)?,
            test_len: cfg.pick(self.test_len, "test-len", base.test_len)?,
            global_test_len: cfg.pick(self.global_test_len, "global-test-len", base.global_test_len)?,
            global_train_len: cfg.pick(self.global_train_len, "global-train-len", base.global_train_len)?,
            test_sets: cfg.pick(self.test_sets, "test-sets", base.test_sets)?,
            train_sets: cfg.pick(self.train_sets, "train-sets", base.train_sets)?,
            grid_size: cfg.pick(self.grid_size, "grid-size", base.grid_size)?,
            order: base.order,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Input CSV; repeat for `--kind l1t-multi`.
    #[arg(long, value_name = "PATH")]
    pub input: Vec<PathBuf>,
    /// Value column to read (default: the second column).
    #[arg(long)]
    pub column: Option<String>,
    /// Output CSV `date,observed,trend`.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Diagnostics JSON (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<FilterKindArg>,
    /// Difference order of the HP filter (1 or 2).
    #[arg(long)]
    pub order: Option<u8>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Level penalty of `l1tc`.
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Slope penalty of `l1tc`.
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Choose λ by cross-validation (HP: spectral match to a T2 moving average).
    #[arg(long)]
    pub auto: bool,
    /// λ as a multiple of λ_max.
    #[arg(long)]
    pub lambda_max_fraction: Option<f64>,
    /// Centre and scale each input of `l1t-multi`.
    #[arg(long)]
    pub standardize: bool,
    #[command(flatten)]
    pub cv: CvArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<String>,
    /// Output CSV `lambda,error`.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Report JSON (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// 2 for L1-T, 1 for L1-C.
    #[arg(long)]
    pub order: Option<u8>,
    #[command(flatten)]
    pub cv: CvArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Model number 1-4.
    #[arg(long)]
    pub model: Option<u8>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV `t,observed,trend`.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Report JSON (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BacktestArgs {
    /// Price CSV.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<String>,
    /// Output CSV `date,wealth,alpha`.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Report JSON (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<TrendModelArg>,
    /// Moving-average window (ma) or trailing fit window (hp).
    #[arg(long)]
    pub window: Option<usize>,
    /// HP λ (default: spectral match to a moving average of T3 samples).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Difference order of the L1 models.
    #[arg(long)]
    pub order: Option<u8>,
    #[arg(long)]
    pub risk_aversion: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_max: Option<f64>,
    /// Realised-variance window (default T3).
    #[arg(long)]
    pub vol_window: Option<usize>,
    #[arg(long)]
    pub initial_wealth: Option<f64>,
    /// Constant risk-free rate per period.
    #[arg(long, allow_hyphen_values = true)]
    pub rate: Option<f64>,
    /// CSV of per-period risk-free rates on the price dates.
    #[arg(long, value_name = "PATH")]
    pub rates: Option<PathBuf>,
    /// First allocation date (or index); earlier prices serve as history only.
    #[arg(long, value_name = "STAMP")]
    pub start: Option<String>,
    #[command(flatten)]
    pub cv: CvArgs,
}
