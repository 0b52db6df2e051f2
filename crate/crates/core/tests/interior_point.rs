#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use l1trend_core::qp::{solve_box_qp, IpmState, KktResidual, NewtonDirection};
use l1trend_core::{BandedSymMatrix, BoxQp, IpmSettings};
use proptest::prelude::*;

fn flatten(r: &KktResidual) -> Vec<f64> {
    [&r.dual, &r.primal_hi, &r.primal_lo, &r.center_hi, &r.center_lo]
        .iter()
        .flat_map(|v| v.iter().copied())
        .collect()
}

/// Random tridiagonal or pentadiagonal SPD matrix with its dense copy.
fn problem(seed: u64, dim: usize) -> (BoxQp, Dense) {
    let mut rng = rng(seed);
    let bw = (seed % 3) as usize;
    let bw = bw.min(dim - 1);
    let mut a = vec![vec![0.0; dim]; dim];
    let offdiag = gaussian(&mut rng, dim * (bw + 1), 1.0);
    for i in 0..dim {
        for k in 1..=bw.min(i) {
            a[i][i - k] = offdiag[i * (bw + 1) + k];
            a[i - k][i] = a[i][i - k];
        }
    }
    let extra = gaussian(&mut rng, dim, 1.0);
    for i in 0..dim {
        let off: f64 = (0..dim).filter(|j| *j != i).map(|j| a[i][j].abs()).sum();
        a[i][i] = off + 0.05 + extra[i].abs();
    }
    let diagonals = (0..=bw).map(|k| (0..dim - k).map(|j| a[j + k][j]).collect()).collect();
    let q = BandedSymMatrix::from_diagonals(diagonals).unwrap();
    let r = gaussian(&mut rng, dim, 3.0);
    let u: Vec<f64> = gaussian(&mut rng, dim, 1.0).iter().map(|v| 0.1 + v.abs()).collect();
    (BoxQp::new(q, r, u).unwrap(), a)
}

fn random_state(seed: u64, dim: usize) -> IpmState {
    let mut rng = rng(seed);
    let pos = |rng: &mut _| -> Vec<f64> {
        gaussian(rng, dim, 1.0).iter().map(|v| 0.2 + v.abs()).collect()
    };
    IpmState {
        nu: gaussian(&mut rng, dim, 0.3),
        slack_hi: pos(&mut rng),
        slack_lo: pos(&mut rng),
        mult_hi: pos(&mut rng),
        mult_lo: pos(&mut rng),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_active_set_enumeration(seed in any::<u64>(), dim in 1usize..=8) {
        let (p, dense) = problem(seed, dim);
        let sol = solve_box_qp(&p, &IpmSettings::default()).unwrap();
        prop_assert!(sol.converged);
        let (best, _) = brute_force_box_qp(&dense, p.linear(), p.upper());
        prop_assert!((p.objective(&sol.nu) - best).abs() <= 1e-6);
    }

    #[test]
    fn jacobian_matches_finite_differences(seed in any::<u64>(), tau in 0.5f64..50.0) {
        let dim = 5;
        let (p, _) = problem(seed, dim);
        let state = random_state(seed ^ 0x5eed, dim);
        let dir = random_state(seed.wrapping_add(17), dim);
        let d = NewtonDirection {
            nu: dir.nu,
            slack_hi: dir.slack_hi,
            slack_lo: dir.slack_lo,
            mult_hi: dir.mult_hi,
            mult_lo: dir.mult_lo,
        };
        let h = 1e-6;
        let shifted = |sign: f64| IpmState {
            nu: state.nu.iter().zip(&d.nu).map(|(a, b)| a + sign * h * b).collect(),
            slack_hi: state.slack_hi.iter().zip(&d.slack_hi).map(|(a, b)| a + sign * h * b).collect(),
            slack_lo: state.slack_lo.iter().zip(&d.slack_lo).map(|(a, b)| a + sign * h * b).collect(),
            mult_hi: state.mult_hi.iter().zip(&d.mult_hi).map(|(a, b)| a + sign * h * b).collect(),
            mult_lo: state.mult_lo.iter().zip(&d.mult_lo).map(|(a, b)| a + sign * h * b).collect(),
        };
        let plus = flatten(&shifted(1.0).residual(&p, tau));
        let minus = flatten(&shifted(-1.0).residual(&p, tau));
        let numeric: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let analytic = flatten(&state.linearized_residual(&p, &d));
        prop_assert!(max_abs_diff(&numeric, &analytic) <= 1e-5);
    }

    #[test]
    fn newton_direction_solves_linearization(seed in any::<u64>(), dim in 1usize..=12) {
        let (p, _) = problem(seed, dim);
        let state = IpmState::initial(&p);
        let tau = 10.0;
        let d = state.newton_step(&p, tau).unwrap();
        let lin = flatten(&state.linearized_residual(&p, &d));
        let r = flatten(&state.residual(&p, tau));
        let sum: Vec<f64> = lin.iter().zip(&r).map(|(a, b)| a + b).collect();
        prop_assert!(norm_inf(&sum) <= 1e-9 * (1.0 + norm_inf(&r)));
    }

    #[test]
    fn certificate_and_feasibility(seed in any::<u64>(), dim in 1usize..=60) {
        let (p, _) = problem(seed, dim);
        let sol = solve_box_qp(&p, &IpmSettings::default()).unwrap();
        prop_assert!(sol.converged);
        let u = p.upper();
        for i in 0..dim {
            // strictly interior
            prop_assert!(sol.nu[i] < u[i] && sol.nu[i] > -u[i]);
        }
        let qn = p.quadratic().matvec(&sol.nu).unwrap();
        for i in 0..dim {
            let stat = qn[i] - p.linear()[i] + sol.mult_hi[i] - sol.mult_lo[i];
            prop_assert!(stat.abs() <= 1e-8);
            prop_assert!(sol.mult_hi[i] * (u[i] - sol.nu[i]) <= 1e-8);
            prop_assert!(sol.mult_lo[i] * (u[i] + sol.nu[i]) <= 1e-8);
        }
        prop_assert!(sol.duality_gap <= 1e-8);
        prop_assert!(sol.kkt_residual <= 1e-8);
    }

    #[test]
    fn gap_decreases(seed in any::<u64>(), dim in 1usize..=60) {
        let (p, _) = problem(seed, dim);
        let sol = solve_box_qp(&p, &IpmSettings::default()).unwrap();
        for w in sol.gap_history.windows(2) {
            prop_assert!(w[1] < w[0], "gap rose: {:?}", sol.gap_history);
        }
    }
}

#[test]
fn ten_dimensional_oracle() {
    for seed in 0..6 {
        let (p, dense) = problem(seed, 10);
        let sol = solve_box_qp(&p, &IpmSettings::default()).unwrap();
        let (best, _) = brute_force_box_qp(&dense, p.linear(), p.upper());
        assert!((p.objective(&sol.nu) - best).abs() <= 1e-6, "seed {seed}");
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let (p, _) = problem(3, 40);
    let sol = solve_box_qp(&p, &IpmSettings { tol: 1e-8, max_iter: 2 }).unwrap();
    assert!(!sol.converged);
    assert_eq!(sol.iterations, 2);
}
