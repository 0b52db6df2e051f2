//! Trend filters: Hodrick-Prescott (L2), L1-T, L1-C, mixed L1-TC and the
//! multivariate L1-T common trend.
//!
//! The L1 filters minimise `½‖y − x‖² + λ‖Dx‖₁` through the dual box QP
//! `min ½νᵀDDᵀν − (Dy)ᵀν, |ν| ≤ λ` and recover the primal trend as
//! `x* = y − Dᵀν*`.

use alloc::vec;
use alloc::vec::Vec;

use crate::banded::{DiffOperator, DiffOrder, MixedDiffOperator, StencilOperator};
use crate::error::{Error, Result};
use crate::math;
use crate::qp::{solve_box_qp, BoxQp, IpmSettings, IpmSolution};

/// Which filter produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Hp(DiffOrder),
    L1(DiffOrder),
    L1Mixed,
    L1Multivariate,
}

impl FilterKind {
    /// Difference order whose breaks characterise the output.
    pub fn break_order(&self) -> DiffOrder {
        match self {
            FilterKind::Hp(o) | FilterKind::L1(o) => *o,
            FilterKind::L1Mixed | FilterKind::L1Multivariate => DiffOrder::Second,
        }
    }
}

/// Regularisation used for a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    Single(f64),
    /// `level` weights `‖D₁x‖₁`, `slope` weights `‖D₂x‖₁`.
    Mixed { level: f64, slope: f64 },
}

/// Interior-point summary attached to L1 fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    pub duality_gap: f64,
    pub kkt_residual: f64,
    pub converged: bool,
}

impl SolveDiagnostics {
    /// Diagnostics of a fit that needed no solve (`λ = 0`).
    pub fn trivial() -> Self {
        Self {
            iterations: 0,
            duality_gap: 0.0,
            kkt_residual: 0.0,
            converged: true,
        }
    }

    fn from_solution(sol: &IpmSolution) -> Self {
        Self {
            iterations: sol.iterations,
            duality_gap: sol.duality_gap,
            kkt_residual: sol.kkt_residual,
            converged: sol.converged,
        }
    }
}

/// Centre and scale applied to one input of the multivariate filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardization {
    pub mean: f64,
    pub std_dev: f64,
}

impl Standardization {
    pub fn to_original(&self, v: f64) -> f64 {
        v * self.std_dev + self.mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    pub kind: FilterKind,
    pub trend: Vec<f64>,
    /// Dual optimum; for the mixed filter the `n − 1` level components come
    /// first, then the `n − 2` slope components. `None` for HP.
    pub dual: Option<Vec<f64>>,
    pub lambda: Lambda,
    pub diagnostics: Option<SolveDiagnostics>,
    /// Per-input statistics when the multivariate filter standardised.
    pub standardization: Option<Vec<Standardization>>,
    /// The signal actually filtered (the cross-sectional mean for the
    /// multivariate filter, `y` otherwise).
    pub signal: Vec<f64>,
}

impl FilterResult {
    /// Break positions with the default tolerance.
    pub fn breaks(&self) -> Vec<usize> {
        let tol = default_break_tolerance(&self.signal);
        detect_breaks(&self.trend, self.kind.break_order(), tol)
    }
}

fn check_lambda(name: &'static str, lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            reason: "must be finite and non-negative",
        });
    }
    Ok(())
}

fn check_signal(y: &[f64], min: usize) -> Result<()> {
    if y.len() < min {
        return Err(Error::LengthTooSmall { len: y.len(), min });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "y",
            reason: "must be finite",
        });
    }
    Ok(())
}

/// Hodrick-Prescott filter: solves `(I + 2λDᵀD) x = y`.
///
/// With `DiffOrder::First` this is the flexible-least-squares level smoother.
pub fn hp_filter(y: &[f64], lambda: f64, order: DiffOrder) -> Result<FilterResult> {
    check_lambda("lambda", lambda)?;
    check_signal(y, order.as_usize() + 1)?;
    let trend = if lambda == 0.0 {
        y.to_vec()
    } else {
        // The null-space part of y passes through unchanged; solving only for
        // the remainder keeps the rounding error relative to a small solution
        // when λ is huge.
        let base = null_space_part(y, order);
        let rest: Vec<f64> = y.iter().zip(&base).map(|(a, b)| a - b).collect();
        let op = DiffOperator::new(order, y.len())?;
        let system = op
            .normal()
            .scaled_plus_diagonal(2.0 * lambda, &vec![1.0; y.len()])?;
        let z = system.solve(&rest)?;
        base.iter().zip(&z).map(|(a, b)| a + b).collect()
    };
    Ok(FilterResult {
        kind: FilterKind::Hp(order),
        trend,
        dual: None,
        lambda: Lambda::Single(lambda),
        diagnostics: None,
        standardization: None,
        signal: y.to_vec(),
    })
}

/// Orthogonal projection of `y` onto the kernel of `D`: the mean (order 1) or
/// the least-squares line (order 2).
fn null_space_part(y: &[f64], order: DiffOrder) -> Vec<f64> {
    let n = y.len();
    let ybar = math::mean(y);
    match order {
        DiffOrder::First => vec![ybar; n],
        DiffOrder::Second => {
            let tbar = (n as f64 - 1.0) / 2.0;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (t, v) in y.iter().enumerate() {
                let dt = t as f64 - tbar;
                sxy += dt * (v - ybar);
                sxx += dt * dt;
            }
            let slope = sxy / sxx;
            (0..n).map(|t| ybar + slope * (t as f64 - tbar)).collect()
        }
    }
}

/// L1 filter with the default solver settings.
pub fn l1_filter(y: &[f64], lambda: f64, order: DiffOrder) -> Result<FilterResult> {
    l1_filter_with(y, lambda, order, &IpmSettings::default())
}

/// Minimises `½‖y − x‖² + λ‖Dx‖₁` with `D` of the given order.
pub fn l1_filter_with(
    y: &[f64],
    lambda: f64,
    order: DiffOrder,
    settings: &IpmSettings,
) -> Result<FilterResult> {
    check_lambda("lambda", lambda)?;
    check_signal(y, order.as_usize() + 1)?;
    let op = DiffOperator::new(order, y.len())?;
    let (trend, dual, diagnostics) = if lambda == 0.0 {
        (y.to_vec(), vec![0.0; op.rows()], SolveDiagnostics::trivial())
    } else {
        solve_dual(&op, y, vec![lambda; op.rows()], settings)?
    };
    Ok(FilterResult {
        kind: FilterKind::L1(order),
        trend,
        dual: Some(dual),
        lambda: Lambda::Single(lambda),
        diagnostics: Some(diagnostics),
        standardization: None,
        signal: y.to_vec(),
    })
}

/// Solves the dual box QP of `op` and maps back to the primal trend.
fn solve_dual<O: StencilOperator>(
    op: &O,
    y: &[f64],
    upper: Vec<f64>,
    settings: &IpmSettings,
) -> Result<(Vec<f64>, Vec<f64>, SolveDiagnostics)> {
    let problem = BoxQp::new(op.gram(), op.apply(y)?, upper)?;
    let sol = solve_box_qp(&problem, settings)?;
    let diagnostics = SolveDiagnostics::from_solution(&sol);
    if !sol.converged {
        return Err(Error::NotConverged {
            iterations: sol.iterations,
            duality_gap: sol.duality_gap,
            kkt_residual: sol.kkt_residual,
        });
    }
    let dtnu = op.apply_transpose(&sol.nu)?;
    let trend = y.iter().zip(&dtnu).map(|(a, b)| a - b).collect();
    Ok((trend, sol.nu, diagnostics))
}

/// Mixed filter `½‖y − x‖² + λ₁‖D₁x‖₁ + λ₂‖D₂x‖₁`.
pub fn l1tc_filter(y: &[f64], lambda1: f64, lambda2: f64) -> Result<FilterResult> {
    l1tc_filter_with(y, lambda1, lambda2, &IpmSettings::default())
}

pub fn l1tc_filter_with(
    y: &[f64],
    lambda1: f64,
    lambda2: f64,
    settings: &IpmSettings,
) -> Result<FilterResult> {
    check_lambda("lambda1", lambda1)?;
    check_lambda("lambda2", lambda2)?;
    check_signal(y, 3)?;
    let n = y.len();
    let lambda = Lambda::Mixed {
        level: lambda1,
        slope: lambda2,
    };

    // A zero weight pins that half of the dual box to the origin, which is
    // exactly the single-penalty filter with the other operator.
    let (trend, dual, diagnostics) = if lambda1 == 0.0 || lambda2 == 0.0 {
        let (order, lam) = if lambda1 == 0.0 {
            (DiffOrder::Second, lambda2)
        } else {
            (DiffOrder::First, lambda1)
        };
        let fit = l1_filter_with(y, lam, order, settings)?;
        let nu = fit.dual.expect("l1 fits carry a dual");
        let dual = if lambda1 == 0.0 {
            [vec![0.0; n - 1], nu].concat()
        } else {
            [nu, vec![0.0; n - 2]].concat()
        };
        (fit.trend, dual, fit.diagnostics.expect("l1 fits carry diagnostics"))
    } else {
        let op = MixedDiffOperator::new(n)?;
        let upper = (0..op.rows())
            .map(|i| if op.is_first(i) { lambda1 } else { lambda2 })
            .collect();
        let (trend, nu, diag) = solve_dual(&op, y, upper, settings)?;
        let (first, second) = op.split(&nu);
        (trend, [first, second].concat(), diag)
    };
    Ok(FilterResult {
        kind: FilterKind::L1Mixed,
        trend,
        dual: Some(dual),
        lambda,
        diagnostics: Some(diagnostics),
        standardization: None,
        signal: y.to_vec(),
    })
}

/// Common L1-T trend of several equally long series:
/// `min ½ Σᵢ ‖y⁽ⁱ⁾ − x‖² + λ‖D₂x‖₁`.
///
/// With `standardize`, each series is first centred and divided by its sample
/// standard deviation; the statistics are kept in the result.
pub fn l1t_multivariate<S: AsRef<[f64]>>(
    ys: &[S],
    lambda: f64,
    standardize: bool,
) -> Result<FilterResult> {
    check_lambda("lambda", lambda)?;
    let first = ys.first().ok_or(Error::EmptySeries)?.as_ref();
    let n = first.len();
    for (i, s) in ys.iter().enumerate() {
        if s.as_ref().len() != n {
            return Err(Error::UnequalLengths {
                index: i,
                expected: n,
                found: s.as_ref().len(),
            });
        }
        check_signal(s.as_ref(), 3)?;
    }

    let mut stats = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(ys.len());
    for s in ys {
        let s = s.as_ref();
        if standardize {
            let mean = math::mean(s);
            let std_dev = math::sample_std(s);
            if !(std_dev > 0.0) {
                return Err(Error::ZeroVariance);
            }
            stats.push(Standardization { mean, std_dev });
            rows.push(s.iter().map(|v| (v - mean) / std_dev).collect());
        } else {
            rows.push(s.to_vec());
        }
    }

    let m = rows.len() as f64;
    let op = DiffOperator::new(DiffOrder::Second, n)?;
    let ybar: Vec<f64> = (0..n)
        .map(|t| rows.iter().map(|r| r[t]).sum::<f64>() / m)
        .collect();

    let (trend, dual, diagnostics) = if lambda == 0.0 {
        (ybar.clone(), vec![0.0; op.rows()], SolveDiagnostics::trivial())
    } else {
        // Linear term of the multivariate dual: m⁻¹ Σᵢ D y⁽ⁱ⁾ (= D ȳ).
        let mut linear = vec![0.0; op.rows()];
        for r in &rows {
            for (acc, v) in linear.iter_mut().zip(op.apply(r)?) {
                *acc += v / m;
            }
        }
        let problem = BoxQp::new(op.gram(), linear, vec![lambda; op.rows()])?;
        let sol = solve_box_qp(&problem, &IpmSettings::default())?;
        if !sol.converged {
            return Err(Error::NotConverged {
                iterations: sol.iterations,
                duality_gap: sol.duality_gap,
                kkt_residual: sol.kkt_residual,
            });
        }
        let dtnu = op.apply_transpose(&sol.nu)?;
        let trend = ybar.iter().zip(&dtnu).map(|(a, b)| a - b).collect();
        (trend, sol.nu.clone(), SolveDiagnostics::from_solution(&sol))
    };

    Ok(FilterResult {
        kind: FilterKind::L1Multivariate,
        trend,
        dual: Some(dual),
        lambda: Lambda::Single(lambda),
        diagnostics: Some(diagnostics),
        standardization: standardize.then_some(stats),
        signal: ybar,
    })
}

/// `1e-6 · ‖y‖∞`, floored so an all-zero signal still gets a positive threshold.
pub fn default_break_tolerance(y: &[f64]) -> f64 {
    (1e-6 * math::norm_inf(y)).max(f64::MIN_POSITIVE)
}

/// Positions where the trend changes slope (order 2) or level (order 1).
///
/// A nonzero difference row `i` is reported at sample `i + 1`: for order 2
/// that is the kink between two linear pieces, for order 1 the first sample
/// of the new level.
pub fn detect_breaks(trend: &[f64], order: DiffOrder, tol: f64) -> Vec<usize> {
    let Ok(op) = DiffOperator::new(order, trend.len()) else {
        return Vec::new();
    };
    op.apply(trend)
        .expect("operator built for this length")
        .iter()
        .enumerate()
        .filter(|(_, d)| d.abs() > tol)
        .map(|(i, _)| i + 1)
        .collect()
}

/// `½‖y − x‖² + λ‖Dx‖₁`.
pub fn l1_objective(y: &[f64], x: &[f64], lambda: f64, order: DiffOrder) -> Result<f64> {
    let op = DiffOperator::new(order, y.len())?;
    Ok(fidelity(y, x)? + lambda * l1_norm(&op.apply(x)?))
}

/// `½‖y − x‖² + λ₁‖D₁x‖₁ + λ₂‖D₂x‖₁`.
pub fn l1tc_objective(y: &[f64], x: &[f64], lambda1: f64, lambda2: f64) -> Result<f64> {
    let d1 = DiffOperator::new(DiffOrder::First, y.len())?;
    let d2 = DiffOperator::new(DiffOrder::Second, y.len())?;
    Ok(fidelity(y, x)?
        + lambda1 * l1_norm(&d1.apply(x)?)
        + lambda2 * l1_norm(&d2.apply(x)?))
}

/// `½ Σᵢ ‖y⁽ⁱ⁾ − x‖² + λ‖D₂x‖₁`.
pub fn multivariate_objective<S: AsRef<[f64]>>(ys: &[S], x: &[f64], lambda: f64) -> Result<f64> {
    let op = DiffOperator::new(DiffOrder::Second, x.len())?;
    let mut total = lambda * l1_norm(&op.apply(x)?);
    for y in ys {
        total += fidelity(y.as_ref(), x)?;
    }
    Ok(total)
}

fn fidelity(y: &[f64], x: &[f64]) -> Result<f64> {
    if y.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: x.len(),
        });
    }
    Ok(0.5 * y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
}

fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}
