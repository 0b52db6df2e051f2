use std::fs::File;
use std::io::Write;

use l1trend_core::calibration::{cv_filter, CvConfig};

use super::diff_order;
use crate::args::CalibrateArgs;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{format_number, ingest_csv, write_report};
use crate::report::{CalibrateReport, CvSummary};

pub fn run(args: &CalibrateArgs, cfg: &Config) -> CliResult<()> {
    let input = crate::required_path(cfg, args.input.clone(), "input")?;
    let output = crate::required_path(cfg, args.output.clone(), "output")?;
    let report_path = cfg.pick_opt(args.report.clone(), "report")?;
    let column: Option<String> = cfg.pick_opt(args.column.clone(), "column")?;
    let order = diff_order(cfg.pick(args.order, "order", 2)?)?;
    let cv = args.cv.resolve(cfg, CvConfig { order, ..CvConfig::reference() })?;
    cv.validate()?;

    let series = ingest_csv(&input, column.as_deref())?;
    let r = cv_filter(series.values(), &cv)?;

    let mut text = String::from("lambda,error\n");
    for (l, e) in r.grid.iter().zip(&r.errors) {
        text.push_str(&format!("{},{}\n", format_number(*l), format_number(*e)));
    }
    File::create(&output)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| CliError::io(&output, e))?;

    let report = CalibrateReport {
        samples: series.len(),
        train_len: cv.train_len,
        test_len: cv.test_len,
        test_sets: cv.test_sets,
        train_sets: cv.train_sets,
        grid_size: cv.grid_size,
        cv: CvSummary::new(order.as_usize() as u8, &r),
        fold_errors: r.fold_errors.clone(),
        breaks: r.fit.breaks(),
    };
    write_report(report_path.as_deref(), &report)
}
