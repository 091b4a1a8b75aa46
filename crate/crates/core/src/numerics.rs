//! Dense linear algebra and quadrature for the small systems the solvers need.

use std::ops::{Index, IndexMut};

use crate::error::{ModelError, Result};
use crate::model::NUM_STATES;

/// Relative pivot threshold: a pivot smaller than this times max|A| is singular.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Default number of Simpson panels for [`integrate_tail`].
pub const SIMPSON_PANELS: usize = 20_000;

/// Largest survival mass allowed beyond the integration limit.
pub const TAIL_TOLERANCE: f64 = 1e-9;

/// Row-major N×N matrix of finite reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareMatrix<const N: usize> {
    entries: [[f64; N]; N],
}

/// The 6×6 matrices used for the generator and the embedded kernel.
pub type Matrix6 = SquareMatrix<NUM_STATES>;

impl<const N: usize> SquareMatrix<N> {
    /// Wraps `entries`, rejecting NaN and infinities.
    pub fn new(entries: [[f64; N]; N]) -> Result<Self> {
        for (row, r) in entries.iter().enumerate() {
            for (col, v) in r.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::NonFinite { row, col });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn zeros() -> Self {
        Self {
            entries: [[0.0; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.entries[i][i] = 1.0;
        }
        m
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for row in self.entries.iter_mut() {
            for v in row.iter_mut() {
                *v *= factor;
            }
        }
        self
    }

    pub fn entries(&self) -> &[[f64; N]; N] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64; N] {
        &self.entries[i]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.entries[j][i] = self.entries[i][j];
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row_sums(&self) -> [f64; N] {
        std::array::from_fn(|i| self.entries[i].iter().sum())
    }

    /// A · x
    pub fn mul_vec(&self, x: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| {
            self.entries[i]
                .iter()
                .zip(x.iter())
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    /// x · A (row vector on the left)
    pub fn vec_mul(&self, x: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|j| (0..N).map(|i| x[i] * self.entries[i][j]).sum())
    }
}

impl<const N: usize> Index<(usize, usize)> for SquareMatrix<N> {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for SquareMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i][j]
    }
}

/// LU factors of a square matrix from Gaussian elimination with partial pivoting.
#[derive(Debug, Clone, Copy)]
pub struct LuFactors<const N: usize> {
    lu: [[f64; N]; N],
    perm: [usize; N],
}

impl<const N: usize> LuFactors<N> {
    /// Factors `a`, failing when a pivot magnitude drops to
    /// [`PIVOT_TOLERANCE`]` · max|A|` or below.
    pub fn new(a: &SquareMatrix<N>) -> Result<Self> {
        let mut m = a.entries;
        let mut perm: [usize; N] = std::array::from_fn(|i| i);
        let threshold = PIVOT_TOLERANCE * a.max_abs();

        for col in 0..N {
            let (pivot_row, pivot_abs) = (col..N)
                .map(|r| (r, m[r][col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= threshold || pivot_abs == 0.0 {
                return Err(ModelError::Singular {
                    column: col,
                    pivot: pivot_abs,
                    threshold,
                });
            }
            if pivot_row != col {
                m.swap(pivot_row, col);
                perm.swap(pivot_row, col);
            }
            let pivot = m[col][col];
            for r in col + 1..N {
                let factor = m[r][col] / pivot;
                m[r][col] = factor;
                if factor == 0.0 {
                    continue;
                }
                for k in col + 1..N {
                    m[r][k] -= factor * m[col][k];
                }
            }
        }
        Ok(Self { lu: m, perm })
    }

    pub fn solve(&self, b: &[f64; N]) -> [f64; N] {
        let mut y: [f64; N] = std::array::from_fn(|i| b[self.perm[i]]);
        for i in 0..N {
            for k in 0..i {
                y[i] -= self.lu[i][k] * y[k];
            }
        }
        for i in (0..N).rev() {
            for k in i + 1..N {
                y[i] -= self.lu[i][k] * y[k];
            }
            y[i] /= self.lu[i][i];
        }
        y
    }
}

/// Solves A·x = b by Gaussian elimination with partial pivoting.
pub fn solve_linear_system<const N: usize>(a: &SquareMatrix<N>, b: &[f64; N]) -> Result<[f64; N]> {
    Ok(LuFactors::new(a)?.solve(b))
}

/// Stationary row vector of a row-stochastic matrix: v = vP with Σv = 1.
///
/// Solves (Pᵀ − I)·vᵀ = 0 with the first balance equation replaced by the
/// normalization Σv = 1. A singular system means the chain has more than
/// one closed class.
pub fn stationary_of_stochastic<const N: usize>(p: &SquareMatrix<N>) -> Result<[f64; N]> {
    let mut a = p.transpose();
    for i in 0..N {
        a[(i, i)] -= 1.0;
    }
    stationary_from_balance(a)
}

/// Stationary distribution of a CTMC generator: πQ = 0 with Σπ = 1.
pub fn stationary_of_generator<const N: usize>(q: &SquareMatrix<N>) -> Result<[f64; N]> {
    stationary_from_balance(q.transpose())
}

// Row 0 is the one replaced. In the cluster models state 0 holds nearly all
// the mass; the rare states keep their own balance rows, which determine
// their probabilities without cancellation.
fn stationary_from_balance<const N: usize>(mut balance: SquareMatrix<N>) -> Result<[f64; N]> {
    for j in 0..N {
        balance[(0, j)] = 1.0;
    }
    let mut rhs = [0.0; N];
    rhs[0] = 1.0;
    let mut v = solve_linear_system(&balance, &rhs)?;
    // round-off can leave entries like -1e-20 for states with no inflow
    for x in v.iter_mut() {
        if *x < 0.0 && *x > -1e-12 {
            *x = 0.0;
        }
    }
    Ok(v)
}

/// Cumulative distribution function of a nonnegative holding time.
pub trait HoldingCdf {
    fn cdf(&self, t: f64) -> f64;

    fn survival(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }
}

/// ∫₀^upper (1 − H(t)) dt by composite Simpson over [`SIMPSON_PANELS`] panels.
///
/// Fails when the survival mass left beyond `upper` exceeds [`TAIL_TOLERANCE`].
pub fn integrate_tail<H: HoldingCdf + ?Sized>(cdf: &H, upper: f64) -> Result<f64> {
    integrate_tail_with(cdf, upper, SIMPSON_PANELS)
}

pub fn integrate_tail_with<H: HoldingCdf + ?Sized>(
    cdf: &H,
    upper: f64,
    panels: usize,
) -> Result<f64> {
    let tail = cdf.survival(upper);
    if !(upper > 0.0) || !upper.is_finite() || tail > TAIL_TOLERANCE {
        return Err(ModelError::NonConvergence { tail, upper });
    }
    let n = panels.max(2) + panels % 2;
    let h = upper / n as f64;
    let mut acc = cdf.survival(0.0) + cdf.survival(upper);
    for k in 1..n {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * cdf.survival(k as f64 * h);
    }
    Ok(acc * h / 3.0)
}
