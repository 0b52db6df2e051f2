use l1trend_core::synth::{Model, ModelParams};
use l1trend_core::Stamp;

use crate::args::SimulateArgs;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{write_csv, write_report};
use crate::report::SimulateReport;

/// Defaults of each model; `n = 2000` throughout.
fn reference(model: Model) -> ModelParams {
    match model {
        Model::StraightTrends => ModelParams::model1_reference(0),
        Model::SwitchingRandomWalk => ModelParams::model2_reference(2000, 0),
        Model::StepLevels => ModelParams::model3_reference(2000, 0),
        Model::MeanReverting => ModelParams::model4_reference(2000, 0),
    }
}

pub fn run(args: &SimulateArgs, cfg: &Config) -> CliResult<()> {
    let number: u8 = cfg
        .pick_opt(args.model, "model")?
        .ok_or_else(|| CliError::usage("--model is required"))?;
    let model = Model::from_number(number)?;
    let output = crate::required_path(cfg, args.output.clone(), "output")?;
    let report_path = cfg.pick_opt(args.report.clone(), "report")?;
    let base = reference(model);
    let params = ModelParams {
        n: cfg.pick(args.n, "n", base.n)?,
        p: cfg.pick(args.p, "p", base.p)?,
        b: cfg.pick(args.b, "b", base.b)?,
        sigma: cfg.pick(args.sigma, "sigma", base.sigma)?,
        theta: cfg.pick(args.theta, "theta", base.theta)?,
        seed: cfg.pick(args.seed, "seed", base.seed)?,
    };
    params.validate(model == Model::MeanReverting)?;

    let sim = model.simulate(&params)?;
    let stamps: Vec<Stamp> = (0..params.n as i64).map(Stamp::Index).collect();
    write_csv(&output, &["t", "observed", "trend"], &stamps, &[&sim.observed, &sim.trend])?;

    let report = SimulateReport {
        model: number,
        n: params.n,
        p: params.p,
        b: params.b,
        sigma: params.sigma,
        theta: (model == Model::MeanReverting).then_some(params.theta),
        seed: params.seed,
        switches: sim.switches,
    };
    write_report(report_path.as_deref(), &report)
}
