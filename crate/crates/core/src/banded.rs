//! r-band LU factorization of the 1D smoothing subsystem.
//!
//! A band subsystem of length `s` and bandwidth `r` is stored as three
//! compressed diagonals tables:
//!
//! * `diag[k]`          = `a_k`     = `A[k][k]`
//! * `upper[k*r + i-1]` = `b_{k,i}` = `A[k][k+i]`
//! * `lower[k*r + i-1]` = `c_{k,i}` = `A[k+i][k]`
//!
//! The factorization writes `A = P * Q` with `P` lower triangular
//! (`alpha` on the diagonal, `gamma_{k,i} = P[k+i][k]` below it) and `Q` unit
//! upper triangular (`beta_{k,i} = Q[k][k+i]`). Both factors keep the
//! bandwidth of `A`, so storage is `O(s r)` and the factorization costs
//! `O(s r^2)`.

use crate::error::{Error, Result};
use crate::weights::WeightTable;

/// Pivots at or below this value are reported as a factorization failure.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// A banded linear system `A u = f`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem {
    n: usize,
    r: usize,
    diag: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
    rhs: Vec<f64>,
}

impl BandedSystem {
    /// An all-zero system. The bandwidth is clipped to `n - 1`.
    pub fn zeros(n: usize, r: usize) -> Self {
        let r = r.min(n.saturating_sub(1));
        BandedSystem {
            n,
            r,
            diag: vec![0.0; n],
            upper: vec![0.0; n * r],
            lower: vec![0.0; n * r],
            rhs: vec![0.0; n],
        }
    }

    /// Extracts the band of a dense row-major matrix. Entries outside the band are ignored.
    pub fn from_dense(matrix: &[f64], n: usize, r: usize, rhs: Vec<f64>) -> Result<Self> {
        if matrix.len() != n * n {
            return Err(Error::Length {
                expected: n * n,
                actual: matrix.len(),
            });
        }
        if rhs.len() != n {
            return Err(Error::Length {
                expected: n,
                actual: rhs.len(),
            });
        }
        let mut sys = Self::zeros(n, r);
        for k in 0..n {
            sys.diag[k] = matrix[k * n + k];
            for i in 1..=sys.r.min(n - 1 - k) {
                sys.set_upper(k, i, matrix[k * n + k + i]);
                sys.set_lower(k, i, matrix[(k + i) * n + k]);
            }
        }
        sys.rhs = rhs;
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bandwidth(&self) -> usize {
        self.r
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn set_rhs(&mut self, rhs: Vec<f64>) -> Result<()> {
        if rhs.len() != self.n {
            return Err(Error::Length {
                expected: self.n,
                actual: rhs.len(),
            });
        }
        self.rhs = rhs;
        Ok(())
    }

    pub fn set_diag(&mut self, k: usize, v: f64) {
        self.diag[k] = v;
    }

    /// `b_{k,i}`, zero outside the matrix.
    #[inline]
    pub fn upper(&self, k: usize, i: usize) -> f64 {
        if i == 0 || i > self.r || k + i >= self.n {
            return 0.0;
        }
        self.upper[k * self.r + i - 1]
    }

    /// `c_{k,i}`, zero outside the matrix.
    #[inline]
    pub fn lower(&self, k: usize, i: usize) -> f64 {
        if i == 0 || i > self.r || k + i >= self.n {
            return 0.0;
        }
        self.lower[k * self.r + i - 1]
    }

    pub fn set_upper(&mut self, k: usize, i: usize, v: f64) {
        assert!((1..=self.r).contains(&i) && k + i < self.n, "b[{k},{i}] outside band");
        self.upper[k * self.r + i - 1] = v;
    }

    pub fn set_lower(&mut self, k: usize, i: usize, v: f64) {
        assert!((1..=self.r).contains(&i) && k + i < self.n, "c[{k},{i}] outside band");
        self.lower[k * self.r + i - 1] = v;
    }

    /// Expands to a dense row-major matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            m[k * n + k] = self.diag[k];
            for i in 1..=self.r.min(n - 1 - k) {
                m[k * n + k + i] = self.upper(k, i);
                m[(k + i) * n + k] = self.lower(k, i);
            }
        }
        m
    }

    /// `A * u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n);
        (0..self.n)
            .map(|k| {
                let mut acc = self.diag[k] * u[k];
                for i in 1..=self.r {
                    if k + i < self.n {
                        acc += self.upper(k, i) * u[k + i];
                    }
                    if i <= k {
                        acc += self.lower(k - i, i) * u[k - i];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Builds the WLS subsystem of one band.
///
/// `a_k = 1 + lambda * sum_j w_{k,j}` over the band neighbours of `k`, the
/// off-diagonals are `-lambda * w`, and the right-hand side is `values`.
pub fn assemble_subsystem(
    values: &[f64],
    weights: &WeightTable,
    lambda: f64,
    r: usize,
) -> Result<BandedSystem> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let s = values.len();
    if s == 0 {
        return Err(Error::invalid("empty band"));
    }
    if weights.len() != s {
        return Err(Error::Length {
            expected: s,
            actual: weights.len(),
        });
    }
    if weights.radius() < r.min(s - 1) {
        return Err(Error::invalid(format!(
            "weight table radius {} below bandwidth {r}",
            weights.radius()
        )));
    }
    let mut sys = BandedSystem::zeros(s, r);
    let r = sys.r;
    let mut neighbour_sum = vec![0.0; s];
    for k in 0..s {
        for t in 1..=r.min(s - 1 - k) {
            let w = lambda * weights.get(k, t);
            neighbour_sum[k] += w;
            neighbour_sum[k + t] += w;
            sys.upper[k * r + t - 1] = -w;
            sys.lower[k * r + t - 1] = -w;
        }
    }
    for (d, sum) in sys.diag.iter_mut().zip(&neighbour_sum) {
        *d = 1.0 + sum;
    }
    sys.rhs = values.to_vec();
    Ok(sys)
}

/// The `P` and `Q` factors of an r-band LU decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedFactors {
    n: usize,
    r: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl BandedFactors {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bandwidth(&self) -> usize {
        self.r
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `beta_{k,i}`, zero outside the matrix.
    #[inline]
    pub fn beta(&self, k: usize, i: usize) -> f64 {
        if i == 0 || i > self.r || k + i >= self.n {
            return 0.0;
        }
        self.beta[k * self.r + i - 1]
    }

    /// `gamma_{k,i}`, zero outside the matrix.
    #[inline]
    pub fn gamma(&self, k: usize, i: usize) -> f64 {
        if i == 0 || i > self.r || k + i >= self.n {
            return 0.0;
        }
        self.gamma[k * self.r + i - 1]
    }

    /// Dense row-major `P`.
    pub fn lower_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            m[k * n + k] = self.alpha[k];
            for i in 1..=self.r.min(n - 1 - k) {
                m[(k + i) * n + k] = self.gamma(k, i);
            }
        }
        m
    }

    /// Dense row-major `Q`.
    pub fn upper_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            m[k * n + k] = 1.0;
            for i in 1..=self.r.min(n - 1 - k) {
                m[k * n + k + i] = self.beta(k, i);
            }
        }
        m
    }

    /// The band of `P * Q`, computed without densifying.
    pub fn reconstruct(&self) -> BandedSystem {
        let (n, r) = (self.n, self.r);
        let mut sys = BandedSystem::zeros(n, r);
        // (PQ)[k][j] = sum_m P[k][m] Q[m][j], m ranging over max(k, j) - r ..= min(k, j).
        let p = |row: usize, col: usize| -> f64 {
            if row == col {
                self.alpha[row]
            } else {
                self.gamma(col, row - col)
            }
        };
        let q = |row: usize, col: usize| -> f64 {
            if row == col {
                1.0
            } else {
                self.beta(row, col - row)
            }
        };
        let entry = |k: usize, j: usize| -> f64 {
            let hi = k.min(j);
            let lo = k.max(j).saturating_sub(r);
            (lo..=hi).map(|m| p(k, m) * q(m, j)).sum()
        };
        for k in 0..n {
            sys.diag[k] = entry(k, k);
            for i in 1..=r.min(n - 1 - k) {
                sys.upper[k * r + i - 1] = entry(k, k + i);
                sys.lower[k * r + i - 1] = entry(k + i, k);
            }
        }
        sys
    }

    /// Solves `P y = f`.
    pub fn forward_substitute(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f.len())?;
        let mut y = f.to_vec();
        self.forward_in_place(&mut y);
        Ok(y)
    }

    /// Solves `Q u = y`.
    pub fn backward_substitute(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y.len())?;
        let mut u = y.to_vec();
        self.backward_in_place(&mut u);
        Ok(u)
    }

    /// Solves `P Q u = f`, overwriting `buf` (holding `f`) with `u`.
    pub fn solve_in_place(&self, buf: &mut [f64]) -> Result<()> {
        self.check_len(buf.len())?;
        self.forward_in_place(buf);
        self.backward_in_place(buf);
        Ok(())
    }

    /// Solves a system whose rows each sum to one, such as a WLS subsystem.
    ///
    /// Such a system maps constants to themselves, so it is solved for the
    /// deviation from the mean of `buf` and the mean is added back. Constant
    /// right-hand sides are reproduced without cancellation error.
    pub fn solve_unit_row_sum(&self, buf: &mut [f64]) -> Result<()> {
        self.check_len(buf.len())?;
        let mean = buf.iter().sum::<f64>() / buf.len() as f64;
        for v in buf.iter_mut() {
            *v -= mean;
        }
        self.forward_in_place(buf);
        self.backward_in_place(buf);
        for v in buf.iter_mut() {
            *v += mean;
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Length {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }

    // y_0 = f_0 / alpha_0
    // y_k = (f_k - sum_{t=1}^{min(k, r)} gamma_{k-t,t} y_{k-t}) / alpha_k
    fn forward_in_place(&self, y: &mut [f64]) {
        let r = self.r;
        for k in 0..self.n {
            let mut acc = y[k];
            for t in 1..=k.min(r) {
                acc -= self.gamma[(k - t) * r + t - 1] * y[k - t];
            }
            y[k] = acc / self.alpha[k];
        }
    }

    // u_{s-1} = y_{s-1}
    // u_k = y_k - sum_{t=1}^{min(r, s-1-k)} beta_{k,t} u_{k+t}
    fn backward_in_place(&self, u: &mut [f64]) {
        let (n, r) = (self.n, self.r);
        for k in (0..n).rev() {
            let mut acc = u[k];
            let row = &self.beta[k * r..k * r + r];
            for t in 1..=r.min(n - 1 - k) {
                acc -= row[t - 1] * u[k + t];
            }
            u[k] = acc;
        }
    }
}

/// Computes the r-band LU decomposition `A = P * Q`.
///
/// Rows are processed top to bottom. For row `k` (0-based) the pivot and the
/// off-diagonal factors are
///
/// ```text
/// alpha_k     = a_k     - sum_{t=1}^{min(k, r)}   gamma_{k-t,t}   beta_{k-t,t}
/// gamma_{k,i} = c_{k,i} - sum_{t=1}^{min(k, r-i)} gamma_{k-t,i+t} beta_{k-t,t}
/// beta_{k,i}  = (b_{k,i} - sum_{t=1}^{min(k, r-i)} beta_{k-t,i+t} gamma_{k-t,t}) / alpha_k
/// ```
///
/// for `i = 1..=min(r, s-1-k)`. The upper limits reproduce every special case
/// of the recurrence: the first row is seeded directly (all sums empty), rows
/// `k < r` see only `k` predecessors, interior rows see `r - i`, and the
/// outermost band `i = r` is copied straight from `A` (`gamma = c`, `beta = b / alpha`).
/// With `r = 1` this is exactly the Thomas algorithm.
pub fn rband_lu_factorize(sys: &BandedSystem) -> Result<BandedFactors> {
    let (n, r) = (sys.n, sys.r);
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n * r];
    let mut gamma = vec![0.0; n * r];

    for k in 0..n {
        let mut a = sys.diag[k];
        for t in 1..=k.min(r) {
            let idx = (k - t) * r + t - 1;
            a -= gamma[idx] * beta[idx];
        }
        if !(a > PIVOT_FLOOR) {
            return Err(Error::Pivot { row: k, value: a });
        }
        alpha[k] = a;

        for i in 1..=r.min(n - 1 - k) {
            let mut g = sys.lower[k * r + i - 1];
            let mut b = sys.upper[k * r + i - 1];
            for t in 1..=k.min(r - i) {
                let prev = (k - t) * r;
                let coupling_g = gamma[prev + t - 1];
                let coupling_b = beta[prev + t - 1];
                g -= gamma[prev + i + t - 1] * coupling_b;
                b -= beta[prev + i + t - 1] * coupling_g;
            }
            gamma[k * r + i - 1] = g;
            beta[k * r + i - 1] = b / a;
        }
    }

    Ok(BandedFactors {
        n,
        r,
        alpha,
        beta,
        gamma,
    })
}

/// Factorizes `sys` and solves for its right-hand side.
pub fn solve_banded(sys: &BandedSystem) -> Result<Vec<f64>> {
    let factors = rband_lu_factorize(sys)?;
    let mut u = sys.rhs.clone();
    factors.solve_in_place(&mut u)?;
    Ok(u)
}

/// Dense Gaussian elimination with partial pivoting on the expanded system.
///
/// Intended as a test oracle. Elimination skips zero multipliers and stops
/// each row update at the pivot row's last non-zero column, so banded inputs
/// cost `O(n^2)` rather than `O(n^3)`.
pub fn dense_solve_oracle(sys: &BandedSystem) -> Result<Vec<f64>> {
    dense_solve(sys.to_dense(), sys.n, sys.rhs.clone())
}

/// Solves a dense row-major `n x n` system with partial pivoting.
pub fn dense_solve(mut m: Vec<f64>, n: usize, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    if m.len() != n * n {
        return Err(Error::Length {
            expected: n * n,
            actual: m.len(),
        });
    }
    if rhs.len() != n {
        return Err(Error::Length {
            expected: n,
            actual: rhs.len(),
        });
    }
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tiny = scale * f64::EPSILON * n as f64;
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|row| (row, m[row * n + col].abs()))
            .fold((col, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
        if !(pivot_abs > tiny) {
            return Err(Error::Singular(col));
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            rhs.swap(col, pivot_row);
        }
        let last = (col..n).rev().find(|&j| m[col * n + j] != 0.0).unwrap_or(col);
        let pivot = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..=last {
                m[row * n + j] -= factor * m[col * n + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut u = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in row + 1..n {
            acc -= m[row * n + j] * u[j];
        }
        u[row] = acc / m[row * n + row];
    }
    Ok(u)
}
