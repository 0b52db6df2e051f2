//! Dense reference implementations shared by the integration tests.
//!
//! Nothing here calls into the banded or interior-point code of the crate.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha20Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Random walk plus noise: the typical shape of a trending signal.
pub fn trending_signal(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    let mut level = 0.0;
    let mut drift = rng.random_range(-0.5..0.5);
    (0..n)
        .map(|_| {
            if rng.random::<f64>() < 0.02 {
                drift = rng.random_range(-0.5..0.5);
            }
            level += drift;
            level + 2.0 * rng.sample::<f64, _>(StandardNormal)
        })
        .collect()
}

/// Difference matrix built from the textbook definition.
pub fn dense_d(order: usize, n: usize) -> Dense {
    match order {
        1 => (0..n - 1)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[i] = -1.0;
                row[i + 1] = 1.0;
                row
            })
            .collect(),
        2 => (0..n - 2)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[i] = 1.0;
                row[i + 1] = -2.0;
                row[i + 2] = 1.0;
                row
            })
            .collect(),
        _ => panic!("order"),
    }
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn transpose(a: &Dense) -> Dense {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| row.iter().zip(col).map(|(p, q)| p * q).sum()).collect())
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &Dense, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Dense = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(*bi);
        r
    }).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-300 {
            return None;
        }
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

/// Least-squares line through `(t, y_t)`, `t = 0..n`, from the normal equations.
pub fn ols_fit(y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let st: f64 = (0..y.len()).map(|t| t as f64).sum();
    let stt: f64 = (0..y.len()).map(|t| (t * t) as f64).sum();
    let sy: f64 = y.iter().sum();
    let sty: f64 = y.iter().enumerate().map(|(t, v)| t as f64 * v).sum();
    let ab = dense_solve(&vec![vec![n, st], vec![st, stt]], &[sy, sty]).unwrap();
    (0..y.len()).map(|t| ab[0] + ab[1] * t as f64).collect()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `½‖y − x‖² + Σ_i w_i |(Dx)_i|` for a dense `D`.
pub fn weighted_l1_objective(y: &[f64], x: &[f64], d: &Dense, w: &[f64]) -> f64 {
    let fit: f64 = y.iter().zip(x).map(|(p, q)| 0.5 * (p - q) * (p - q)).sum();
    let dx = matvec(d, x);
    fit + dx.iter().zip(w).map(|(v, wi)| wi * v.abs()).sum::<f64>()
}

/// Orthogonal projection onto the null space of the rows of `d` listed in
/// `rows`, by Gram-Schmidt on those rows (dependent rows are dropped).
fn null_projector(d: &Dense, rows: &[usize], n: usize) -> impl Fn(&[f64]) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &r in rows {
        let mut v = d[r].clone();
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(p, q)| p * q).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    move |x: &[f64]| {
        let mut out = x.to_vec();
        for b in &basis {
            let c: f64 = out.iter().zip(b).map(|(p, q)| p * q).sum();
            for (o, bi) in out.iter_mut().zip(b) {
                *o -= c * bi;
            }
        }
        debug_assert_eq!(out.len(), n);
        out
    }
}

/// Exact minimum of `½‖y − x‖² + Σ w_i |(Dx)_i|` by enumerating every
/// zero/sign pattern of `Dx`.
///
/// For a pattern with zero set `Z` and signs `s` elsewhere, the stationarity
/// condition gives `x = P_Z (y − Σ_{i∉Z} w_i s_i d_i)`, with `P_Z` the
/// projection onto `{x : D_Z x = 0}`. Every candidate is feasible, and the
/// optimal pattern reproduces the minimiser, so the minimum of the true
/// objective over all candidates is the optimum. Signs are walked in Gray
/// code order so each candidate costs one vector update.
pub fn brute_force_l1(y: &[f64], d: &Dense, w: &[f64]) -> (f64, Vec<f64>) {
    let n = y.len();
    let rows = d.len();
    assert!(rows <= 20, "enumeration too large");
    let mut best = (f64::INFINITY, y.to_vec());
    for zmask in 0u32..(1 << rows) {
        let zero: Vec<usize> = (0..rows).filter(|i| zmask >> i & 1 == 1).collect();
        let free: Vec<usize> = (0..rows).filter(|i| zmask >> i & 1 == 0).collect();
        let project = null_projector(d, &zero, n);
        let base = project(y);
        let dirs: Vec<Vec<f64>> = free
            .iter()
            .map(|&i| project(&d[i]).iter().map(|v| w[i] * v).collect())
            .collect();
        // Start with every sign at +1: x = base − Σ dirs.
        let mut signs = vec![1.0; free.len()];
        let mut x = base.clone();
        for dir in &dirs {
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi -= di;
            }
        }
        let total = 1u64 << free.len();
        for step in 0..total {
            if step > 0 {
                let k = step.trailing_zeros() as usize;
                // Flip s_k: x changes by 2 s_k dir_k.
                let s = signs[k];
                for (xi, di) in x.iter_mut().zip(&dirs[k]) {
                    *xi += 2.0 * s * di;
                }
                signs[k] = -s;
            }
            let obj = weighted_l1_objective(y, &x, d, w);
            if obj < best.0 {
                best = (obj, x.clone());
            }
        }
    }
    best
}

/// Exact minimum of `½νᵀQν − rᵀν` over `|ν| ≤ u` by enumerating which
/// coordinates sit at `−u`, at `+u`, or are free.
pub fn brute_force_box_qp(q: &Dense, r: &[f64], u: &[f64]) -> (f64, Vec<f64>) {
    let n = r.len();
    let objective = |nu: &[f64]| {
        let qn = matvec(q, nu);
        0.5 * nu.iter().zip(&qn).map(|(a, b)| a * b).sum::<f64>()
            - r.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let patterns = 3usize.pow(n as u32);
    for code in 0..patterns {
        let mut state = vec![0u8; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let mut nu = vec![0.0; n];
        let mut free = Vec::new();
        for i in 0..n {
            match state[i] {
                0 => free.push(i),
                1 => nu[i] = u[i],
                _ => nu[i] = -u[i],
            }
        }
        if !free.is_empty() {
            let a: Dense = free.iter().map(|&i| free.iter().map(|&j| q[i][j]).collect()).collect();
            let b: Vec<f64> = free
                .iter()
                .map(|&i| {
                    r[i] - (0..n).filter(|j| state[*j] != 0).map(|j| q[i][j] * nu[j]).sum::<f64>()
                })
                .collect();
            let Some(sol) = dense_solve(&a, &b) else { continue };
            if sol.iter().zip(&free).any(|(v, &i)| v.abs() > u[i] * (1.0 + 1e-12)) {
                continue;
            }
            for (v, &i) in sol.iter().zip(&free) {
                nu[i] = *v;
            }
        }
        let obj = objective(&nu);
        if obj < best.0 {
            best = (obj, nu);
        }
    }
    best
}

/// `Dᵀν` for the difference operator of `order` on `n` points, written out
/// from the stencil definition.
pub fn dt_apply(order: usize, nu: &[f64], n: usize) -> Vec<f64> {
    let stencil: &[f64] = if order == 1 { &[-1.0, 1.0] } else { &[1.0, -2.0, 1.0] };
    assert_eq!(nu.len() + order, n);
    let mut out = vec![0.0; n];
    for (i, v) in nu.iter().enumerate() {
        for (k, c) in stencil.iter().enumerate() {
            out[i + k] += c * v;
        }
    }
    out
}

/// `Dy` from the stencil definition.
pub fn d_apply(order: usize, y: &[f64]) -> Vec<f64> {
    match order {
        1 => y.windows(2).map(|w| w[1] - w[0]).collect(),
        _ => y.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect(),
    }
}

/// `‖(DDᵀ)⁻¹Dy‖∞` through a dense solve.
pub fn dense_lambda_max(order: usize, y: &[f64]) -> f64 {
    let d = dense_d(order, y.len());
    let gram = matmul(&d, &transpose(&d));
    let nu = dense_solve(&gram, &matvec(&d, y)).unwrap();
    norm_inf(&nu)
}
