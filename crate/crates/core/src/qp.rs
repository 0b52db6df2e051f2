//! Primal-dual interior-point solver for box-constrained QPs with a banded
//! quadratic form:
//!
//! ```text
//! minimise   ½ νᵀQν − rᵀν
//! subject to −u ≤ ν ≤ u
//! ```
//!
//! Slacks `s_hi = u − ν`, `s_lo = u + ν` are carried as separate variables so
//! that complementarity products stay resolvable when `ν` sits on a large bound.
//! The Newton system of the perturbed KKT conditions is reduced by block
//! elimination of the slack and multiplier rows to one banded solve with
//! `Q + diag(μ_hi/s_hi + μ_lo/s_lo)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::banded::BandedSymMatrix;
use crate::error::{Error, Result};
use crate::math;

/// Barrier parameter growth relative to the current surrogate gap.
const BARRIER_FACTOR: f64 = 10.0;
/// Sufficient-decrease parameter of the residual backtracking.
const ARMIJO: f64 = 0.01;
/// Backtracking contraction.
const BACKTRACK: f64 = 0.5;
/// Fraction-to-boundary cap.
const BOUNDARY_FRACTION: f64 = 0.99;
const MAX_BACKTRACKS: usize = 60;
/// Diagonal boosts tried before a Newton system is declared indefinite.
const REGULARIZATION_TRIES: usize = 6;

/// Dual QP of an L1 filter: quadratic form, linear term and symmetric bounds.
#[derive(Debug, Clone)]
pub struct BoxQp {
    q: BandedSymMatrix,
    linear: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxQp {
    pub fn new(q: BandedSymMatrix, linear: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = q.dim();
        for len in [linear.len(), upper.len()] {
            if len != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: len,
                });
            }
        }
        if upper.iter().any(|u| !(*u > 0.0) || !u.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "upper",
                reason: "bounds must be finite and strictly positive",
            });
        }
        if linear.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "linear",
                reason: "must be finite",
            });
        }
        Ok(Self { q, linear, upper })
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn quadratic(&self) -> &BandedSymMatrix {
        &self.q
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `½ νᵀQν − rᵀν`.
    pub fn objective(&self, nu: &[f64]) -> f64 {
        let qn = self.q.matvec(nu).expect("dimension checked at construction");
        0.5 * math::dot(nu, &qn) - math::dot(&self.linear, nu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmSettings {
    /// Target for both the surrogate duality gap and the KKT residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IpmSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Primal-dual iterate. All slacks and multipliers are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct IpmState {
    pub nu: Vec<f64>,
    pub slack_hi: Vec<f64>,
    pub slack_lo: Vec<f64>,
    pub mult_hi: Vec<f64>,
    pub mult_lo: Vec<f64>,
}

/// Residual of the barrier-perturbed KKT system at barrier parameter `τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KktResidual {
    /// `Qν − r + μ_hi − μ_lo`
    pub dual: Vec<f64>,
    /// `ν + s_hi − u`
    pub primal_hi: Vec<f64>,
    /// `−ν + s_lo − u`
    pub primal_lo: Vec<f64>,
    /// `μ_hi ∘ s_hi − 1/τ`
    pub center_hi: Vec<f64>,
    /// `μ_lo ∘ s_lo − 1/τ`
    pub center_lo: Vec<f64>,
}

impl KktResidual {
    fn parts(&self) -> [&[f64]; 5] {
        [
            &self.dual,
            &self.primal_hi,
            &self.primal_lo,
            &self.center_hi,
            &self.center_lo,
        ]
    }

    pub fn norm2(&self) -> f64 {
        math::sqrt(
            self.parts()
                .iter()
                .flat_map(|p| p.iter())
                .map(|v| v * v)
                .sum(),
        )
    }

    pub fn norm_inf(&self) -> f64 {
        self.parts().iter().fold(0.0, |m, p| m.max(math::norm_inf(p)))
    }

    /// Largest dual or primal-feasibility violation, ignoring centrality.
    pub fn feasibility_inf(&self) -> f64 {
        math::norm_inf(&self.dual)
            .max(math::norm_inf(&self.primal_hi))
            .max(math::norm_inf(&self.primal_lo))
    }
}

/// Search direction in the same coordinates as [`IpmState`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonDirection {
    pub nu: Vec<f64>,
    pub slack_hi: Vec<f64>,
    pub slack_lo: Vec<f64>,
    pub mult_hi: Vec<f64>,
    pub mult_lo: Vec<f64>,
}

impl IpmState {
    /// `ν = 0`, slacks at the bounds, unit multipliers.
    pub fn initial(problem: &BoxQp) -> Self {
        let m = problem.dim();
        Self {
            nu: vec![0.0; m],
            slack_hi: problem.upper.clone(),
            slack_lo: problem.upper.clone(),
            mult_hi: vec![1.0; m],
            mult_lo: vec![1.0; m],
        }
    }

    /// Surrogate duality gap `μ_hiᵀ s_hi + μ_loᵀ s_lo`.
    pub fn surrogate_gap(&self) -> f64 {
        math::dot(&self.mult_hi, &self.slack_hi) + math::dot(&self.mult_lo, &self.slack_lo)
    }

    pub fn residual(&self, problem: &BoxQp, tau: f64) -> KktResidual {
        let qn = problem.q.matvec(&self.nu).expect("state matches problem");
        let inv_tau = 1.0 / tau;
        let m = problem.dim();
        let mut r = KktResidual {
            dual: Vec::with_capacity(m),
            primal_hi: Vec::with_capacity(m),
            primal_lo: Vec::with_capacity(m),
            center_hi: Vec::with_capacity(m),
            center_lo: Vec::with_capacity(m),
        };
        for i in 0..m {
            r.dual
                .push(qn[i] - problem.linear[i] + self.mult_hi[i] - self.mult_lo[i]);
            r.primal_hi
                .push(self.nu[i] + self.slack_hi[i] - problem.upper[i]);
            r.primal_lo
                .push(-self.nu[i] + self.slack_lo[i] - problem.upper[i]);
            r.center_hi.push(self.mult_hi[i] * self.slack_hi[i] - inv_tau);
            r.center_lo.push(self.mult_lo[i] * self.slack_lo[i] - inv_tau);
        }
        r
    }

    /// Jacobian of the residual applied to `d`; the Newton direction solves
    /// `J d = −r`.
    pub fn linearized_residual(&self, problem: &BoxQp, d: &NewtonDirection) -> KktResidual {
        let qd = problem.q.matvec(&d.nu).expect("direction matches problem");
        let m = problem.dim();
        let mut out = KktResidual {
            dual: Vec::with_capacity(m),
            primal_hi: Vec::with_capacity(m),
            primal_lo: Vec::with_capacity(m),
            center_hi: Vec::with_capacity(m),
            center_lo: Vec::with_capacity(m),
        };
        for i in 0..m {
            out.dual.push(qd[i] + d.mult_hi[i] - d.mult_lo[i]);
            out.primal_hi.push(d.nu[i] + d.slack_hi[i]);
            out.primal_lo.push(-d.nu[i] + d.slack_lo[i]);
            out.center_hi
                .push(self.mult_hi[i] * d.slack_hi[i] + self.slack_hi[i] * d.mult_hi[i]);
            out.center_lo
                .push(self.mult_lo[i] * d.slack_lo[i] + self.slack_lo[i] * d.mult_lo[i]);
        }
        out
    }

    /// Newton direction for `r_τ = 0` via one banded solve.
    pub fn newton_step(&self, problem: &BoxQp, tau: f64) -> Result<NewtonDirection> {
        let r = self.residual(problem, tau);
        self.newton_step_from(problem, &r)
    }

    fn newton_step_from(&self, problem: &BoxQp, r: &KktResidual) -> Result<NewtonDirection> {
        let m = problem.dim();
        let mut shift = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for i in 0..m {
            let (sh, sl) = (self.slack_hi[i], self.slack_lo[i]);
            let (mh, ml) = (self.mult_hi[i], self.mult_lo[i]);
            shift.push(mh / sh + ml / sl);
            rhs.push(
                -r.dual[i] + (r.center_hi[i] - mh * r.primal_hi[i]) / sh
                    - (r.center_lo[i] - ml * r.primal_lo[i]) / sl,
            );
        }
        let dnu = solve_regularized(&problem.q, &shift, &rhs)?;
        if dnu.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown("non-finite Newton direction"));
        }
        let mut d = NewtonDirection {
            slack_hi: Vec::with_capacity(m),
            slack_lo: Vec::with_capacity(m),
            mult_hi: Vec::with_capacity(m),
            mult_lo: Vec::with_capacity(m),
            nu: dnu,
        };
        for i in 0..m {
            let dsh = -r.primal_hi[i] - d.nu[i];
            let dsl = -r.primal_lo[i] + d.nu[i];
            d.slack_hi.push(dsh);
            d.slack_lo.push(dsl);
            d.mult_hi
                .push(-(r.center_hi[i] + self.mult_hi[i] * dsh) / self.slack_hi[i]);
            d.mult_lo
                .push(-(r.center_lo[i] + self.mult_lo[i] * dsl) / self.slack_lo[i]);
        }
        Ok(d)
    }

    fn advanced(&self, d: &NewtonDirection, step: f64) -> Self {
        let add = |x: &[f64], dx: &[f64]| -> Vec<f64> {
            x.iter().zip(dx).map(|(a, b)| a + step * b).collect()
        };
        Self {
            nu: add(&self.nu, &d.nu),
            slack_hi: add(&self.slack_hi, &d.slack_hi),
            slack_lo: add(&self.slack_lo, &d.slack_lo),
            mult_hi: add(&self.mult_hi, &d.mult_hi),
            mult_lo: add(&self.mult_lo, &d.mult_lo),
        }
    }

    /// Largest step keeping every slack and multiplier positive, scaled by the
    /// fraction-to-boundary cap and clipped to 1.
    fn max_step(&self, d: &NewtonDirection) -> f64 {
        let mut step: f64 = 1.0;
        let pairs = [
            (&self.slack_hi, &d.slack_hi),
            (&self.slack_lo, &d.slack_lo),
            (&self.mult_hi, &d.mult_hi),
            (&self.mult_lo, &d.mult_lo),
        ];
        for (x, dx) in pairs {
            for (xi, dxi) in x.iter().zip(dx.iter()) {
                if *dxi < 0.0 {
                    step = step.min(-BOUNDARY_FRACTION * xi / dxi);
                }
            }
        }
        step
    }
}

/// Outcome of [`solve_box_qp`]. `converged` is false when the iteration budget
/// ran out or the line search stalled; the last iterate is still returned.
#[derive(Debug, Clone, PartialEq)]
pub struct IpmSolution {
    pub nu: Vec<f64>,
    /// Multipliers of `ν ≤ u` and `−ν ≤ u`.
    pub mult_hi: Vec<f64>,
    pub mult_lo: Vec<f64>,
    pub iterations: usize,
    pub duality_gap: f64,
    pub kkt_residual: f64,
    pub converged: bool,
    /// Surrogate gap before each Newton step, then at the returned iterate.
    pub gap_history: Vec<f64>,
}

/// Solves `(Q + diag(shift)) x = rhs`. A semidefinite `Q` (stacked difference
/// operators) can lose definiteness to rounding once the barrier terms become
/// tiny; the diagonal is then raised in steps relative to the largest entry of
/// `Q` until the factorisation succeeds.
fn solve_regularized(q: &BandedSymMatrix, shift: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let scale = q.diagonal(0).iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
    let mut extra = 0.0;
    for _ in 0..REGULARIZATION_TRIES {
        let diag: Vec<f64> = shift.iter().map(|s| s + extra).collect();
        match q.scaled_plus_diagonal(1.0, &diag)?.solve(rhs) {
            Err(Error::NotPositiveDefinite { .. }) => {
                extra = if extra == 0.0 { 1e-14 * scale } else { 100.0 * extra };
            }
            other => return other,
        }
    }
    Err(Error::NumericalBreakdown("Newton system lost positive definiteness"))
}

/// Solves the box QP from the default interior start.
pub fn solve_box_qp(problem: &BoxQp, settings: &IpmSettings) -> Result<IpmSolution> {
    if !(settings.tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must be positive",
        });
    }
    let m = problem.dim();
    let inequalities = (2 * m) as f64;
    let mut state = IpmState::initial(problem);
    let mut gap_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    loop {
        let gap = state.surrogate_gap();
        let tau = BARRIER_FACTOR * inequalities / gap;
        let r = state.residual(problem, tau);
        gap_history.push(gap);
        if gap <= settings.tol && r.feasibility_inf() <= settings.tol {
            converged = true;
            break;
        }
        if iterations >= settings.max_iter {
            break;
        }
        let d = state.newton_step_from(problem, &r)?;
        let r_norm = r.norm2();
        let mut step = state.max_step(&d);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = state.advanced(&d, step);
            if trial.residual(problem, tau).norm2() <= (1.0 - ARMIJO * step) * r_norm {
                accepted = Some(trial);
                break;
            }
            step *= BACKTRACK;
        }
        iterations += 1;
        match accepted {
            Some(next) => state = next,
            None => break,
        }
    }

    let final_gap = state.surrogate_gap();
    let kkt_residual = state.residual(problem, 1.0).feasibility_inf();
    if let Some(last) = gap_history.last_mut() {
        *last = final_gap;
    }
    Ok(IpmSolution {
        nu: state.nu,
        mult_hi: state.mult_hi,
        mult_lo: state.mult_lo,
        iterations,
        duality_gap: final_gap,
        kkt_residual,
        converged,
        gap_history,
    })
}
