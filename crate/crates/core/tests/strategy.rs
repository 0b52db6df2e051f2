mod common;

use common::*;
use l1trend_core::calibration::CvConfig;
use l1trend_core::strategy::{
    moving_average_trend, optimal_allocation, performance_stats, realized_vol, run_backtest,
    run_backtest_from, step_wealth, Rates, StrategyConfig, TrendModel, VARIANCE_FLOOR,
};
use l1trend_core::{DiffOrder, Error};
use proptest::prelude::*;

fn small_cv() -> CvConfig {
    CvConfig {
        train_len: 40,
        test_len: 10,
        global_test_len: 40,
        global_train_len: 80,
        test_sets: 2,
        train_sets: 2,
        grid_size: 5,
        order: DiffOrder::Second,
    }
}

fn config(model: TrendModel) -> StrategyConfig {
    let mut cfg = StrategyConfig::new(model);
    cfg.cv = small_cv();
    cfg.vol_window = 20;
    cfg
}

fn all_models() -> Vec<TrendModel> {
    vec![
        TrendModel::MovingAverage { window: 10 },
        TrendModel::Hp { lambda: 50.0, window: 30 },
        TrendModel::L1Local,
        TrendModel::L1Global,
        TrendModel::L1TwoTrend,
    ]
}

/// Geometric random walk with a small drift.
fn prices(seed: u64, n: usize) -> Vec<f64> {
    let shocks = gaussian(&mut rng(seed), n, 0.01);
    let mut s = 100.0;
    shocks
        .iter()
        .map(|z| {
            s *= (0.0005 + z).exp();
            s
        })
        .collect()
}

fn fast_models() -> impl Strategy<Value = TrendModel> {
    prop_oneof![
        (1usize..30).prop_map(|window| TrendModel::MovingAverage { window }),
        (0.0f64..1e4, 3usize..40).prop_map(|(lambda, window)| TrendModel::Hp { lambda, window }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn walk_forward_purity(model in fast_models(), seed in any::<u64>(), cut in 1usize..40) {
        let p = prices(seed, 120);
        let cfg = config(model);
        let full = run_backtest(&p, &Rates::Constant(1e-4), &cfg).unwrap();
        let end = p.len() - cut;
        prop_assume!(end > cfg.required_prices());
        let part = run_backtest(&p[..end], &Rates::Constant(1e-4), &cfg).unwrap();
        prop_assert_eq!(part.start, full.start);
        let k = part.allocations.len();
        prop_assert_eq!(&part.allocations[..], &full.allocations[..k]);
        prop_assert_eq!(&part.wealth[..], &full.wealth[..k]);
    }

    #[test]
    fn bounds_and_recursion(
        model in fast_models(),
        seed in any::<u64>(),
        lo in -2.0f64..0.0,
        width in 0.0f64..3.0,
        ra in 0.1f64..10.0,
        r in 0.0f64..1e-3,
    ) {
        let p = prices(seed, 100);
        let mut cfg = config(model);
        cfg.alpha_min = lo;
        cfg.alpha_max = lo + width;
        cfg.risk_aversion = ra;
        let rep = run_backtest(&p, &Rates::Constant(r), &cfg).unwrap();
        prop_assert!(rep.allocations.iter().all(|a| *a >= cfg.alpha_min && *a <= cfg.alpha_max));
        prop_assert_eq!(rep.wealth[0], cfg.initial_wealth);
        for k in 0..rep.wealth.len() - 1 {
            let t = rep.start + k;
            let next = step_wealth(rep.wealth[k], rep.allocations[k], p[t + 1] / p[t], r);
            prop_assert_eq!(rep.wealth[k + 1], next);
        }
    }

    #[test]
    fn allocation_is_clipped_formula(mu in -1.0f64..1.0, s2 in 1e-6f64..1.0, ra in 0.1f64..10.0) {
        let mut cfg = config(TrendModel::MovingAverage { window: 3 });
        cfg.risk_aversion = ra;
        let a = optimal_allocation(mu, s2, &cfg).unwrap();
        prop_assert_eq!(a, (mu / (ra * s2)).clamp(-1.0, 1.0));
    }
}

#[test]
fn l1_models_are_walk_forward() {
    let p = prices(21, 190);
    for model in [TrendModel::L1Local, TrendModel::L1Global, TrendModel::L1TwoTrend] {
        let cfg = config(model);
        let full = run_backtest(&p, &Rates::Constant(0.0), &cfg).unwrap();
        for cut in [1, 7] {
            let part = run_backtest(&p[..p.len() - cut], &Rates::Constant(0.0), &cfg).unwrap();
            let k = part.allocations.len();
            assert_eq!(&part.allocations[..], &full.allocations[..k], "{model:?}");
        }
        assert!(full.allocations.iter().all(|a| a.abs() <= 1.0));
    }
}

#[test]
fn uptrend_gains_for_every_model() {
    let g = 1e-3;
    let p: Vec<f64> = (0..200).map(|t| 50.0 * (g * t as f64).exp()).collect();
    for model in all_models() {
        let cfg = config(model);
        let rep = run_backtest(&p, &Rates::Constant(0.0), &cfg).unwrap();
        let last = *rep.wealth.last().unwrap();
        assert!(last > cfg.initial_wealth, "{model:?}");
        assert_eq!(*rep.allocations.last().unwrap(), cfg.alpha_max, "{model:?}");
        assert!(rep.stats.performance_pct > 0.0);
        assert!(rep.floored.is_empty() && rep.failures.is_empty());
    }
}

#[test]
fn constant_prices_compound_the_rate() {
    let p = vec![20.0; 180];
    let r = 2e-4;
    for model in all_models() {
        let cfg = config(model);
        let rep = run_backtest(&p, &Rates::Constant(r), &cfg).unwrap();
        assert!(rep.allocations.iter().all(|a| *a == 0.0));
        assert_eq!(rep.floored.len(), rep.wealth.len());
        assert!(rep.sigma2.iter().all(|v| *v == 0.0));
        for (k, w) in rep.wealth.iter().enumerate() {
            let want = cfg.initial_wealth * (1.0 + r).powi(k as i32);
            assert!((w - want).abs() <= 1e-10 * want);
        }
    }
    let rep = run_backtest(&p, &Rates::Constant(0.0), &config(all_models()[0])).unwrap();
    assert!(rep.wealth.iter().all(|w| *w == 100.0));
    assert_eq!(rep.stats.max_drawdown_pct, 0.0);
}

#[test]
fn per_period_rates() {
    let p = prices(4, 90);
    let cfg = config(TrendModel::MovingAverage { window: 5 });
    let a = run_backtest(&p, &Rates::Constant(3e-4), &cfg).unwrap();
    let b = run_backtest(&p, &Rates::PerPeriod(vec![3e-4; 90]), &cfg).unwrap();
    assert_eq!(a, b);

    let rates: Vec<f64> = (0..90).map(|t| 1e-4 * (t % 3) as f64).collect();
    let c = run_backtest(&p, &Rates::PerPeriod(rates.clone()), &cfg).unwrap();
    for k in 0..c.wealth.len() - 1 {
        let t = c.start + k;
        assert_eq!(c.wealth[k + 1], step_wealth(c.wealth[k], c.allocations[k], p[t + 1] / p[t], rates[t]));
    }
    assert!(matches!(
        run_backtest(&p, &Rates::PerPeriod(vec![0.0; 89]), &cfg),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn history_and_price_errors() {
    let cfg = config(TrendModel::MovingAverage { window: 5 });
    let need = cfg.required_prices();
    assert!(matches!(
        run_backtest(&vec![1.0; need], &Rates::Constant(0.0), &cfg),
        Err(Error::InsufficientHistory { .. })
    ));
    let mut p = vec![1.0; 60];
    p[30] = 0.0;
    assert!(matches!(
        run_backtest(&p, &Rates::Constant(0.0), &cfg),
        Err(Error::NonPositivePrice { index: 30 })
    ));
    assert!(realized_vol(&[1.0, -2.0, 3.0], 2).is_err());
    let mut bad = cfg;
    bad.alpha_min = 2.0;
    assert!(run_backtest(&prices(1, 60), &Rates::Constant(0.0), &bad).is_err());
}

#[test]
fn moving_average_on_geometric_growth() {
    let g = 0.0123;
    let p: Vec<f64> = (0..50).map(|t| 3.0 * (g * t as f64).exp()).collect();
    for window in [1, 5, 20, 49] {
        assert!((moving_average_trend(&p, window).unwrap() - g).abs() < 1e-12);
    }
}

#[test]
fn realized_vol_law_of_large_numbers() {
    let s = 0.02;
    let r = gaussian(&mut rng(33), 5000, s);
    let mut p = vec![10.0];
    for x in &r {
        let last = *p.last().unwrap();
        p.push(last * x.exp());
    }
    let v = realized_vol(&p, 5000).unwrap();
    assert!((v / (s * s) - 1.0).abs() < 0.1);
}

#[test]
fn performance_examples() {
    let stats = performance_stats(&[100.0, 110.0, 99.0], None, 0.0).unwrap();
    assert!((stats.max_drawdown_pct - 10.0).abs() < 1e-12);
    assert!(stats.information_ratio.is_none());

    let up: Vec<f64> = (0..30).map(|t| 100.0 + t as f64).collect();
    let stats = performance_stats(&up, Some(&up), 0.0).unwrap();
    assert_eq!(stats.max_drawdown_pct, 0.0);
    assert_eq!(stats.information_ratio, Some(0.0));

    // One year of steady 1% growth per period.
    let w: Vec<f64> = (0..=260).map(|t| 1.01f64.powi(t)).collect();
    let stats = performance_stats(&w, None, 0.0).unwrap();
    let want = 100.0 * (1.01f64.powi(260) - 1.0);
    assert!((stats.performance_pct - want).abs() <= 1e-9 * want);
    assert!(stats.volatility_pct < 1e-9);

    assert!(matches!(performance_stats(&[], None, 0.0), Err(Error::EmptySeries)));
}

#[test]
fn sharpe_and_ir_conventions() {
    let w = prices(8, 400);
    let b = prices(9, 400);
    let r = 1e-4;
    let stats = performance_stats(&w, Some(&b), r).unwrap();
    let lr: Vec<f64> = w.windows(2).map(|p| (p[1] / p[0]).ln()).collect();
    let sd = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let vol = sd(&lr) * 260f64.sqrt();
    let annual = (w[399] / w[0]).powf(260.0 / 399.0) - 1.0;
    let rf = (1.0 + r).powf(260.0) - 1.0;
    assert!((stats.sharpe - (annual - rf) / vol).abs() < 1e-10);
    let ex: Vec<f64> = lr.iter().zip(b.windows(2)).map(|(a, p)| a - (p[1] / p[0]).ln()).collect();
    let ir = mean(&ex) * 260f64.sqrt() / sd(&ex);
    assert!((stats.information_ratio.unwrap() - ir).abs() < 1e-10);
}

#[test]
fn floor_is_flagged() {
    // Flat prices followed by a single tiny move keep the variance under the floor.
    let mut p = vec![100.0; 60];
    p[59] = 100.0 * (1.0 + 1e-7);
    let cfg = config(TrendModel::MovingAverage { window: 3 });
    let rep = run_backtest(&p, &Rates::Constant(0.0), &cfg).unwrap();
    assert_eq!(rep.floored.len(), rep.wealth.len());
    assert!(rep.sigma2.iter().all(|v| *v < VARIANCE_FLOOR));
    assert_eq!(*rep.allocations.last().unwrap(), 1.0);
}

#[test]
fn later_start_rescales_the_same_path() {
    let p = prices(13, 150);
    let cfg = config(TrendModel::Hp { lambda: 200.0, window: 30 });
    let full = run_backtest(&p, &Rates::Constant(1e-4), &cfg).unwrap();
    let late = run_backtest_from(&p, &Rates::Constant(1e-4), &cfg, 90).unwrap();
    assert_eq!(late.start, 90);
    let skip = 90 - full.start;
    assert_eq!(&late.allocations[..], &full.allocations[skip..]);
    let scale = cfg.initial_wealth / full.wealth[skip];
    for (a, b) in late.wealth.iter().zip(&full.wealth[skip..]) {
        assert!((a - b * scale).abs() <= 1e-10 * a);
    }
    let early = run_backtest_from(&p, &Rates::Constant(1e-4), &cfg, 0).unwrap();
    assert_eq!(early, full);
    assert!(run_backtest_from(&p, &Rates::Constant(0.0), &cfg, 149).is_err());
}
