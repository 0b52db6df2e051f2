use l1trend_core::calibration::{cv_filter, l2_lambda_for_window, lambda_max, CvConfig};
use l1trend_core::filters::{
    hp_filter, l1_filter, l1_objective, l1t_multivariate, l1tc_filter, l1tc_objective,
    multivariate_objective, FilterResult,
};
use l1trend_core::{DiffOrder, Series};

use super::diff_order;
use crate::args::{FilterArgs, FilterKindArg};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{ingest_csv, write_csv, write_report};
use crate::report::{CvSummary, FilterReport, ScaleEntry, Solver};

enum Choice {
    Explicit(f64),
    Auto,
    Fraction(f64),
}

fn lambda_choice(args: &FilterArgs, cfg: &Config) -> CliResult<Option<Choice>> {
    let from = |lambda: Option<f64>, auto: bool, fraction: Option<f64>| -> CliResult<Option<Choice>> {
        let set = lambda.is_some() as u8 + auto as u8 + fraction.is_some() as u8;
        if set > 1 {
            return Err(CliError::usage(
                "--lambda, --auto and --lambda-max-fraction are mutually exclusive",
            ));
        }
        Ok(lambda
            .map(Choice::Explicit)
            .or(fraction.map(Choice::Fraction))
            .or(auto.then_some(Choice::Auto)))
    };
    match from(args.lambda, args.auto, args.lambda_max_fraction)? {
        Some(c) => Ok(Some(c)),
        None => from(cfg.get("lambda")?, cfg.flag("auto")?, cfg.get("lambda-max-fraction")?),
    }
}

fn kind_name(kind: FilterKindArg) -> &'static str {
    match kind {
        FilterKindArg::Hp => "hp",
        FilterKindArg::L1t => "l1t",
        FilterKindArg::L1c => "l1c",
        FilterKindArg::L1tc => "l1tc",
        FilterKindArg::L1tMulti => "l1t-multi",
    }
}

struct Fit {
    result: FilterResult,
    source: &'static str,
    lambda_max: Option<f64>,
    cv: Vec<CvSummary>,
}

pub fn run(args: &FilterArgs, cfg: &Config) -> CliResult<()> {
    let kind: FilterKindArg = cfg
        .pick_opt(args.kind, "kind")?
        .ok_or_else(|| CliError::usage("--kind is required"))?;
    let inputs = if args.input.is_empty() {
        cfg.get("input")?.into_iter().collect()
    } else {
        args.input.clone()
    };
    if inputs.is_empty() {
        return Err(CliError::usage("--input is required"));
    }
    if inputs.len() > 1 && kind != FilterKindArg::L1tMulti {
        return Err(CliError::usage("several --input files need --kind l1t-multi"));
    }
    if args.order.is_some() && kind != FilterKindArg::Hp {
        return Err(CliError::usage("--order applies to --kind hp only"));
    }
    let output = crate::required_path(cfg, args.output.clone(), "output")?;
    let report_path = cfg.pick_opt(args.report.clone(), "report")?;
    let column: Option<String> = cfg.pick_opt(args.column.clone(), "column")?;
    let standardize = args.standardize || cfg.flag("standardize")?;
    if standardize && kind != FilterKindArg::L1tMulti {
        return Err(CliError::usage("--standardize applies to --kind l1t-multi only"));
    }

    let series: Vec<Series> = inputs
        .iter()
        .map(|p| ingest_csv(p, column.as_deref()))
        .collect::<CliResult<_>>()?;
    for (s, path) in series.iter().zip(&inputs).skip(1) {
        if s.times() != series[0].times() {
            return Err(CliError::data(format!(
                "{}: time stamps differ from {}",
                path.display(),
                inputs[0].display()
            )));
        }
    }
    series[0].require_filterable()?;

    let order = match kind {
        FilterKindArg::Hp => diff_order(cfg.pick(args.order, "order", 2)?)?,
        FilterKindArg::L1c => DiffOrder::First,
        _ => DiffOrder::Second,
    };
    let cv = args.cv.resolve(cfg, CvConfig { order, ..CvConfig::reference() })?;
    let choice = lambda_choice(args, cfg)?;

    let fit = match kind {
        FilterKindArg::L1tc => {
            let auto = match choice {
                None => false,
                Some(Choice::Auto) => true,
                Some(_) => {
                    return Err(CliError::usage("--kind l1tc takes --lambda1 and --lambda2, or --auto"))
                }
            };
            let y = series[0].values();
            let (l1, l2, source, summaries) = if auto {
                let level = cv_filter(y, &CvConfig { order: DiffOrder::First, ..cv })?;
                let slope = cv_filter(y, &CvConfig { order: DiffOrder::Second, ..cv })?;
                let s = vec![CvSummary::new(1, &level), CvSummary::new(2, &slope)];
                (level.lambda_star, slope.lambda_star, "auto", s)
            } else {
                let need = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| CliError::usage(format!("--kind l1tc requires --{key}")))
                };
                let l1 = need(cfg.pick_opt(args.lambda1, "lambda1")?, "lambda1")?;
                let l2 = need(cfg.pick_opt(args.lambda2, "lambda2")?, "lambda2")?;
                (l1, l2, "explicit", Vec::new())
            };
            Fit { result: l1tc_filter(y, l1, l2)?, source, lambda_max: None, cv: summaries }
        }
        FilterKindArg::L1tMulti => {
            let ys: Vec<&[f64]> = series.iter().map(|s| s.values()).collect();
            let signal = l1t_multivariate(&ys, 0.0, standardize)?.signal;
            let (lambda, source, lm, summaries) = single_lambda(&signal, order, &cv, choice)?;
            Fit {
                result: l1t_multivariate(&ys, lambda, standardize)?,
                source,
                lambda_max: lm,
                cv: summaries,
            }
        }
        FilterKindArg::Hp => {
            let y = series[0].values();
            let lambda = match choice {
                Some(Choice::Explicit(l)) => l,
                Some(Choice::Auto) => l2_lambda_for_window(cv.test_len as f64)?,
                Some(Choice::Fraction(_)) => {
                    return Err(CliError::usage("--lambda-max-fraction applies to L1 filters only"))
                }
                None => return Err(CliError::usage("--lambda or --auto is required")),
            };
            let source = if matches!(choice, Some(Choice::Auto)) { "auto" } else { "explicit" };
            Fit { result: hp_filter(y, lambda, order)?, source, lambda_max: None, cv: Vec::new() }
        }
        FilterKindArg::L1t | FilterKindArg::L1c => {
            let y = series[0].values();
            let (lambda, source, lm, summaries) = single_lambda(y, order, &cv, choice)?;
            Fit { result: l1_filter(y, lambda, order)?, source, lambda_max: lm, cv: summaries }
        }
    };

    let r = &fit.result;
    let times = series[0].times();
    write_csv(&output, &["date", "observed", "trend"], times, &[&r.signal, &r.trend])?;

    let objective = match kind {
        FilterKindArg::Hp => None,
        FilterKindArg::L1t | FilterKindArg::L1c => {
            Some(l1_objective(&r.signal, &r.trend, single(r), order)?)
        }
        FilterKindArg::L1tc => {
            let (a, b) = mixed(r);
            Some(l1tc_objective(&r.signal, &r.trend, a, b)?)
        }
        FilterKindArg::L1tMulti => {
            let rows: Vec<Vec<f64>> = match &r.standardization {
                Some(stats) => series
                    .iter()
                    .zip(stats)
                    .map(|(s, st)| s.values().iter().map(|v| (v - st.mean) / st.std_dev).collect())
                    .collect(),
                None => series.iter().map(|s| s.values().to_vec()).collect(),
            };
            Some(multivariate_objective(&rows, &r.trend, single(r))?)
        }
    };
    let breaks = r.breaks();
    let (lambda, lambda1, lambda2) = match r.lambda {
        l1trend_core::Lambda::Single(l) => (Some(l), None, None),
        l1trend_core::Lambda::Mixed { level, slope } => (None, Some(level), Some(slope)),
    };
    let report = FilterReport {
        kind: kind_name(kind),
        samples: r.trend.len(),
        inputs: series.len(),
        lambda_source: fit.source,
        lambda,
        lambda1,
        lambda2,
        lambda_max: fit.lambda_max,
        objective,
        solver: r.diagnostics.map(|d| Solver {
            iterations: d.iterations,
            duality_gap: d.duality_gap,
            kkt_residual: d.kkt_residual,
            converged: d.converged,
        }),
        break_order: r.kind.break_order().as_usize() as u8,
        break_stamps: breaks.iter().map(|i| times[*i].to_string()).collect(),
        breaks,
        cv: fit.cv,
        standardization: r.standardization.as_ref().map(|v| {
            v.iter().map(|s| ScaleEntry { mean: s.mean, std_dev: s.std_dev }).collect()
        }),
    };
    write_report(report_path.as_deref(), &report)
}

/// λ for the single-penalty L1 filters.
fn single_lambda(
    signal: &[f64],
    order: DiffOrder,
    cv: &CvConfig,
    choice: Option<Choice>,
) -> CliResult<(f64, &'static str, Option<f64>, Vec<CvSummary>)> {
    match choice {
        Some(Choice::Explicit(l)) => Ok((l, "explicit", None, Vec::new())),
        Some(Choice::Fraction(f)) => {
            if !(f >= 0.0) || !f.is_finite() {
                return Err(CliError::usage("--lambda-max-fraction must be finite and non-negative"));
            }
            let lm = lambda_max(signal, order)?;
            Ok((f * lm, "lambda-max-fraction", Some(lm), Vec::new()))
        }
        Some(Choice::Auto) => {
            let report = cv_filter(signal, cv)?;
            let summary = CvSummary::new(order.as_usize() as u8, &report);
            Ok((report.lambda_star, "auto", None, vec![summary]))
        }
        None => Err(CliError::usage(
            "one of --lambda, --auto or --lambda-max-fraction is required",
        )),
    }
}

fn single(r: &FilterResult) -> f64 {
    match r.lambda {
        l1trend_core::Lambda::Single(l) => l,
        l1trend_core::Lambda::Mixed { slope, .. } => slope,
    }
}

fn mixed(r: &FilterResult) -> (f64, f64) {
    match r.lambda {
        l1trend_core::Lambda::Mixed { level, slope } => (level, slope),
        l1trend_core::Lambda::Single(l) => (0.0, l),
    }
}
