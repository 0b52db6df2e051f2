//! Difference operators and banded symmetric positive-definite solves.
//!
//! Every filter reduces to products with a sparse difference operator `D` and
//! to solves with `D Dᵀ` (dual problems, `λ_max`) or `I + 2λ DᵀD` (HP). Both
//! are symmetric banded matrices, stored here by lower diagonals and factored
//! with a band Cholesky in `O(n · bandwidth²)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Order of the finite difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiffOrder {
    /// `x_{t+1} - x_t`; penalising it yields piecewise-constant levels.
    First,
    /// `x_t - 2x_{t+1} + x_{t+2}`; penalising it yields piecewise-linear trends.
    Second,
}

impl DiffOrder {
    pub fn as_usize(self) -> usize {
        match self {
            DiffOrder::First => 1,
            DiffOrder::Second => 2,
        }
    }

    pub fn from_usize(order: usize) -> Result<Self> {
        match order {
            1 => Ok(DiffOrder::First),
            2 => Ok(DiffOrder::Second),
            _ => Err(Error::InvalidParameter {
                name: "order",
                reason: "must be 1 or 2",
            }),
        }
    }

    pub fn stencil(self) -> &'static [f64] {
        match self {
            DiffOrder::First => &[-1.0, 1.0],
            DiffOrder::Second => &[1.0, -2.0, 1.0],
        }
    }
}

/// A sparse operator whose rows are short contiguous stencils.
///
/// Implementors only describe their rows; products, adjoints and the two
/// banded Gram matrices follow generically.
pub trait StencilOperator {
    /// Number of rows.
    fn rows(&self) -> usize;

    /// Number of columns (signal length).
    fn cols(&self) -> usize;

    /// First column touched by row `i`, and the row coefficients from there on.
    fn row(&self, i: usize) -> (usize, &'static [f64]);

    /// Bandwidth of `D Dᵀ`.
    fn gram_bandwidth(&self) -> usize;

    /// Bandwidth of `DᵀD`.
    fn normal_bandwidth(&self) -> usize;

    /// `D v`.
    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(v.len(), self.cols())?;
        Ok((0..self.rows())
            .map(|i| {
                let (start, coeffs) = self.row(i);
                math::dot(coeffs, &v[start..start + coeffs.len()])
            })
            .collect())
    }

    /// `Dᵀ u`.
    fn apply_transpose(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(u.len(), self.rows())?;
        let mut out = vec![0.0; self.cols()];
        for (i, ui) in u.iter().enumerate() {
            let (start, coeffs) = self.row(i);
            for (k, c) in coeffs.iter().enumerate() {
                out[start + k] += c * ui;
            }
        }
        Ok(out)
    }

    /// `D Dᵀ` in banded storage.
    fn gram(&self) -> BandedSymMatrix {
        let m = self.rows();
        let bw = self.gram_bandwidth();
        let mut a = BandedSymMatrix::zeros(m, bw);
        for i in 0..m {
            let (si, ci) = self.row(i);
            for j in i.saturating_sub(bw)..=i {
                let (sj, cj) = self.row(j);
                let lo = si.max(sj);
                let hi = (si + ci.len()).min(sj + cj.len());
                let mut s = 0.0;
                for col in lo..hi {
                    s += ci[col - si] * cj[col - sj];
                }
                a.bands[i - j][j] = s;
            }
        }
        a
    }

    /// `DᵀD` in banded storage.
    fn normal(&self) -> BandedSymMatrix {
        let n = self.cols();
        let mut a = BandedSymMatrix::zeros(n, self.normal_bandwidth());
        for i in 0..self.rows() {
            let (start, coeffs) = self.row(i);
            for (p, cp) in coeffs.iter().enumerate() {
                for (q, cq) in coeffs.iter().enumerate().take(p + 1) {
                    a.bands[p - q][start + q] += cp * cq;
                }
            }
        }
        a
    }
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// First or second difference operator, `(n - order) × n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffOperator {
    order: DiffOrder,
    n: usize,
}

impl DiffOperator {
    pub fn new(order: DiffOrder, n: usize) -> Result<Self> {
        let min = order.as_usize() + 1;
        if n < min {
            return Err(Error::LengthTooSmall { len: n, min });
        }
        Ok(Self { order, n })
    }

    pub fn order(&self) -> DiffOrder {
        self.order
    }
}

impl StencilOperator for DiffOperator {
    fn rows(&self) -> usize {
        self.n - self.order.as_usize()
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> (usize, &'static [f64]) {
        (i, self.order.stencil())
    }

    fn gram_bandwidth(&self) -> usize {
        self.order.as_usize()
    }

    fn normal_bandwidth(&self) -> usize {
        self.order.as_usize()
    }
}

/// First and second differences stacked and interleaved by position.
///
/// Row `2k` is the first difference starting at `k` and row `2k + 1` the second
/// difference starting at `k`, so `D Dᵀ` stays banded with bandwidth 4. Use
/// [`MixedDiffOperator::split`] and [`MixedDiffOperator::merge`] to move between
/// this ordering and the block ordering `(D₁; D₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedDiffOperator {
    n: usize,
}

impl MixedDiffOperator {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::LengthTooSmall { len: n, min: 3 });
        }
        Ok(Self { n })
    }

    /// True when interleaved row `i` is a first difference.
    pub fn is_first(&self, i: usize) -> bool {
        i.is_multiple_of(2)
    }

    /// Interleaved vector → (first-difference part, second-difference part).
    pub fn split(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let first = v.iter().step_by(2).copied().collect();
        let second = v.iter().skip(1).step_by(2).copied().collect();
        (first, second)
    }

    /// Inverse of [`split`](Self::split).
    pub fn merge(&self, first: &[f64], second: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(first.len() + second.len());
        for k in 0..first.len() {
            out.push(first[k]);
            if let Some(s) = second.get(k) {
                out.push(*s);
            }
        }
        out
    }
}

impl StencilOperator for MixedDiffOperator {
    fn rows(&self) -> usize {
        2 * self.n - 3
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> (usize, &'static [f64]) {
        if self.is_first(i) {
            (i / 2, DiffOrder::First.stencil())
        } else {
            (i / 2, DiffOrder::Second.stencil())
        }
    }

    fn gram_bandwidth(&self) -> usize {
        4
    }

    fn normal_bandwidth(&self) -> usize {
        2
    }
}

/// Symmetric matrix stored by its lower diagonals.
///
/// `bands[k][j]` holds `A[j + k][j]`, so `bands[0]` is the main diagonal and
/// `bands[k]` has `n - k` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymMatrix {
    n: usize,
    bands: Vec<Vec<f64>>,
}

impl BandedSymMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bands = (0..=bandwidth)
            .map(|k| vec![0.0; n.saturating_sub(k)])
            .collect();
        Self { n, bands }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, 0);
        a.bands[0].iter_mut().for_each(|d| *d = 1.0);
        a
    }

    /// Builds from lower diagonals; `diagonals[k]` must have `n - k` entries.
    pub fn from_diagonals(diagonals: Vec<Vec<f64>>) -> Result<Self> {
        let n = diagonals.first().map_or(0, Vec::len);
        for (k, d) in diagonals.iter().enumerate() {
            check_len(d.len(), n.saturating_sub(k))?;
        }
        Ok(Self {
            n,
            bands: diagonals,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.bands[k]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        if k > self.bandwidth() {
            0.0
        } else {
            self.bands[k][lo]
        }
    }

    /// Row-major dense copy; meant for diagnostics and small test oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `self * scale + diag(shift)`.
    pub fn scaled_plus_diagonal(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        check_len(shift.len(), self.n)?;
        let mut out = self.clone();
        for band in out.bands.iter_mut() {
            band.iter_mut().for_each(|v| *v *= scale);
        }
        for (d, s) in out.bands[0].iter_mut().zip(shift) {
            *d += s;
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(x.len(), self.n)?;
        let mut y: Vec<f64> = self.bands[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (j, a) in band.iter().enumerate() {
                y[j + k] += a * x[j];
                y[j] += a * x[j + k];
            }
        }
        Ok(y)
    }

    /// Band Cholesky `A = L Lᵀ`, without pivoting.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let n = self.n;
        let bw = self.bandwidth();
        let mut l = self.bands.clone();
        for j in 0..n {
            let k0 = j.saturating_sub(bw);
            let mut d = l[0][j];
            for k in k0..j {
                let v = l[j - k][k];
                d -= v * v;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let d = math::sqrt(d);
            l[0][j] = d;
            for i in j + 1..(j + bw + 1).min(n) {
                let mut s = l[i - j][j];
                for k in i.saturating_sub(bw)..j {
                    s -= l[i - k][k] * l[j - k][k];
                }
                l[i - j][j] = s / d;
            }
        }
        Ok(BandCholesky { n, bands: l })
    }

    /// Solves `A x = b`; fails if `A` is not positive definite.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.cholesky()?.solve(b)
    }
}

/// Lower band Cholesky factor, same layout as [`BandedSymMatrix`].
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bands: Vec<Vec<f64>>,
}

impl BandCholesky {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(b.len(), self.n)?;
        let n = self.n;
        let bw = self.bands.len() - 1;
        let l = &self.bands;
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in i.saturating_sub(bw)..i {
                s -= l[i - k][k] * z[k];
            }
            z[i] = s / l[0][i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= l[k - i][i] * z[k];
            }
            z[i] = s / l[0][i];
        }
        Ok(z)
    }
}
