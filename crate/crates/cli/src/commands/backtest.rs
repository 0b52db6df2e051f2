use l1trend_core::calibration::{l2_lambda_for_window, CvConfig};
use l1trend_core::strategy::{
    performance_stats, run_backtest_from, Rates, StrategyConfig, TrendModel,
};
use l1trend_core::Stamp;

use super::diff_order;
use crate::args::{BacktestArgs, TrendModelArg};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{ingest_csv, parse_stamp, round12, write_csv, write_report};
use crate::report::{BacktestReport, Stats, Windows};

fn model_name(m: TrendModelArg) -> &'static str {
    match m {
        TrendModelArg::Ma => "ma",
        TrendModelArg::Hp => "hp",
        TrendModelArg::L1Local => "l1-local",
        TrendModelArg::L1Global => "l1-global",
        TrendModelArg::L1TwoTrend => "l1-two-trend",
    }
}

pub fn run(args: &BacktestArgs, cfg: &Config) -> CliResult<()> {
    let input = crate::required_path(cfg, args.input.clone(), "input")?;
    let output = crate::required_path(cfg, args.output.clone(), "output")?;
    let report_path = cfg.pick_opt(args.report.clone(), "report")?;
    let column: Option<String> = cfg.pick_opt(args.column.clone(), "column")?;
    let which: TrendModelArg = cfg
        .pick_opt(args.model, "model")?
        .ok_or_else(|| CliError::usage("--model is required"))?;

    let order = diff_order(cfg.pick(args.order, "order", 2)?)?;
    let cv = args.cv.resolve(cfg, CvConfig { order, ..CvConfig::momentum() })?;
    let window: Option<usize> = cfg.pick_opt(args.window, "window")?;
    let lambda: Option<f64> = cfg.pick_opt(args.lambda, "lambda")?;
    let trend_model = match which {
        TrendModelArg::Ma => TrendModel::MovingAverage {
            window: window.unwrap_or(cv.global_test_len),
        },
        TrendModelArg::Hp => TrendModel::Hp {
            lambda: match lambda {
                Some(l) => l,
                None => l2_lambda_for_window(cv.global_test_len as f64)?,
            },
            window: window.unwrap_or(cv.global_train_len),
        },
        TrendModelArg::L1Local => TrendModel::L1Local,
        TrendModelArg::L1Global => TrendModel::L1Global,
        TrendModelArg::L1TwoTrend => TrendModel::L1TwoTrend,
    };
    let defaults = StrategyConfig { cv, ..StrategyConfig::new(trend_model) };
    let strategy = StrategyConfig {
        risk_aversion: cfg.pick(args.risk_aversion, "risk-aversion", defaults.risk_aversion)?,
        alpha_min: cfg.pick(args.alpha_min, "alpha-min", defaults.alpha_min)?,
        alpha_max: cfg.pick(args.alpha_max, "alpha-max", defaults.alpha_max)?,
        vol_window: cfg.pick(args.vol_window, "vol-window", cv.global_test_len)?,
        initial_wealth: cfg.pick(args.initial_wealth, "initial-wealth", defaults.initial_wealth)?,
        ..defaults
    };
    strategy.validate()?;

    let series = ingest_csv(&input, column.as_deref())?;
    let rate_flag: Option<f64> = cfg.pick_opt(args.rate, "rate")?;
    let rates_path = cfg.pick_opt(args.rates.clone(), "rates")?;
    let rates = match (rate_flag, rates_path) {
        (Some(_), Some(_)) => return Err(CliError::usage("--rate and --rates are mutually exclusive")),
        (Some(r), None) => Rates::Constant(r),
        (None, None) => Rates::Constant(0.0),
        (None, Some(path)) => {
            let r = ingest_csv(&path, None)?;
            if r.times() != series.times() {
                return Err(CliError::data(format!(
                    "{}: rate dates must match the price dates",
                    path.display()
                )));
            }
            Rates::PerPeriod(r.values().to_vec())
        }
    };

    let first = match cfg.pick_opt::<String>(args.start.clone(), "start")? {
        None => 0,
        Some(text) => {
            let at = parse_stamp(&text)
                .ok_or_else(|| CliError::usage(format!("--start: cannot parse `{text}`")))?;
            if std::mem::discriminant(&at) != std::mem::discriminant(&series.times()[0]) {
                return Err(CliError::usage("--start must match the input's time stamp kind"));
            }
            series
                .times()
                .iter()
                .position(|t| *t >= at)
                .ok_or_else(|| CliError::data(format!("no price on or after {text}")))?
        }
    };
    let prices = series.values();
    let bt = run_backtest_from(prices, &rates, &strategy, first)?;
    let stamps: &[Stamp] = &series.times()[bt.start..];
    write_csv(&output, &["date", "wealth", "alpha"], stamps, &[&bt.wealth, &bt.allocations])?;

    let rate = match &rates {
        Rates::Constant(r) => *r,
        Rates::PerPeriod(v) => {
            let tail = &v[bt.start..];
            tail.iter().sum::<f64>() / tail.len() as f64
        }
    };
    let written: Vec<f64> = bt.wealth.iter().map(|w| round12(*w)).collect();
    let benchmark = &prices[bt.start..];
    let stats = performance_stats(&written, Some(benchmark), rate)?;
    let hold = performance_stats(benchmark, None, rate)?;
    let stamp = |t: &usize| series.times()[*t].to_string();

    let report = BacktestReport {
        model: model_name(which),
        window: match trend_model {
            TrendModel::MovingAverage { window } | TrendModel::Hp { window, .. } => Some(window),
            _ => None,
        },
        lambda: match trend_model {
            TrendModel::Hp { lambda, .. } => Some(lambda),
            _ => None,
        },
        cv: matches!(
            which,
            TrendModelArg::L1Local | TrendModelArg::L1Global | TrendModelArg::L1TwoTrend
        )
        .then_some(Windows {
            order: order.as_usize() as u8,
            train_len: cv.train_len,
            test_len: cv.test_len,
            global_test_len: cv.global_test_len,
            global_train_len: cv.global_train_len,
            test_sets: cv.test_sets,
            train_sets: cv.train_sets,
            grid_size: cv.grid_size,
        }),
        risk_aversion: strategy.risk_aversion,
        alpha_min: strategy.alpha_min,
        alpha_max: strategy.alpha_max,
        vol_window: strategy.vol_window,
        initial_wealth: strategy.initial_wealth,
        rate,
        prices: prices.len(),
        start_index: bt.start,
        start: stamp(&bt.start),
        end: stamp(&(prices.len() - 1)),
        final_wealth: *written.last().expect("at least two dates"),
        stats: Stats::from(stats),
        benchmark: Stats::from(hold),
        floored: bt.floored.iter().map(stamp).collect(),
        failures: bt.failures.iter().map(stamp).collect(),
    };
    write_report(report_path.as_deref(), &report)
}
