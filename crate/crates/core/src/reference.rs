//! Exact 2D WLS at desk scale.
//!
//! Assembles the full `S x S` system (`S = width * height`) coupling every
//! pixel to its `(2r + 1) x (2r + 1)` window and solves it with
//! conjugate gradient. This is an oracle for the semi-global filter, not a production
//! path: the iteration count grows with the condition number, which for
//! strong edge-aware weights is large.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::weights::{guidance_distance, WeightParams};

/// Largest pixel count [`assemble_full`] accepts.
pub const MAX_PIXELS: usize = 65536;

/// Relative residual at which [`solve_full`] stops.
pub const CG_TOLERANCE: f64 = 1e-10;

/// `A = D + L` with `D` a positive diagonal fidelity term and `L` a weighted
/// graph Laplacian, stored as symmetric CSR couplings `c_ij = lambda * w_ij`.
///
/// Keeping the Laplacian in coupling form lets products be evaluated as
/// `d_i u_i + sum_j c_ij (u_i - u_j)`, which is exact on constants and does not
/// lose the fidelity term to cancellation when `c_ij` is huge.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    n: usize,
    fidelity: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    couplings: Vec<f64>,
}

impl SparseSystem {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Diagonal entry `d_i + sum_j c_ij`.
    pub fn diagonal(&self, i: usize) -> f64 {
        self.fidelity[i] + self.couplings[self.row_ptr[i]..self.row_ptr[i + 1]].iter().sum::<f64>()
    }

    /// Off-diagonal neighbours of row `i` as `(col, c_ij)`; the matrix entry is `-c_ij`.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.couplings[span].iter().copied())
    }

    /// Coordinate list `(row, col, value)` of `A`, diagonal first in each row.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.n + self.cols.len());
        for i in 0..self.n {
            out.push((i, i, self.diagonal(i)));
            out.extend(self.neighbours(i).map(|(j, c)| (i, j, -c)));
        }
        out
    }

    /// Row-major dense copy; only sensible for small systems.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n * self.n];
        for (i, j, v) in self.entries() {
            m[i * self.n + j] = v;
        }
        m
    }

    /// `A u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_into(u, &mut out);
        out
    }

    fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let ui = u[i];
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.couplings[k] * (ui - u[self.cols[k]]);
            }
            *o = self.fidelity[i] * ui + acc;
        }
    }

    /// `sum_i d_i (u_i - f_i)^2 + sum_{i<j} c_ij (u_i - u_j)^2`.
    ///
    /// Each unordered pair is counted once, so the solution of `A u = D f` is
    /// this energy's exact minimizer.
    pub fn energy(&self, u: &[f64], f: &[f64]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n {
            e += self.fidelity[i] * (u[i] - f[i]).powi(2);
            for (j, c) in self.neighbours(i) {
                if j > i {
                    e += c * (u[i] - u[j]).powi(2);
                }
            }
        }
        e
    }
}

/// Builds the full WLS system for `guidance` with square `(2r + 1)^2` neighbourhoods.
pub fn assemble_full(guidance: &Image, lambda: f64, r: usize, weight: &WeightParams) -> Result<SparseSystem> {
    let (w, h) = (guidance.width(), guidance.height());
    let n = w * h;
    if n > MAX_PIXELS {
        return Err(Error::invalid(format!("{w}x{h} exceeds the {MAX_PIXELS}-pixel reference limit")));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    weight.validate()?;

    let side = 2 * r + 1;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(n * (side * side - 1));
    let mut couplings = Vec::with_capacity(cols.capacity());
    row_ptr.push(0);
    for row in 0..h {
        for col in 0..w {
            let gi = guidance.pixel(row, col);
            for nr in row.saturating_sub(r)..=(row + r).min(h - 1) {
                for nc in col.saturating_sub(r)..=(col + r).min(w - 1) {
                    if (nr, nc) == (row, col) {
                        continue;
                    }
                    let dr = nr.abs_diff(row) as f64;
                    let dc = nc.abs_diff(col) as f64;
                    let om = weight.weight(dr.hypot(dc), guidance_distance(gi, guidance.pixel(nr, nc)));
                    cols.push(nr * w + nc);
                    couplings.push(lambda * om);
                }
            }
            row_ptr.push(cols.len());
        }
    }
    Ok(SparseSystem {
        n,
        fidelity: vec![1.0; n],
        row_ptr,
        cols,
        couplings,
    })
}

/// Solves `A U = F` per channel by Jacobi-preconditioned conjugate gradient.
pub fn solve_full(sys: &SparseSystem, f: &Image) -> Result<Image> {
    if f.pixel_count() != sys.n {
        return Err(Error::Length {
            expected: sys.n,
            actual: f.pixel_count(),
        });
    }
    let planes = f
        .planes()
        .into_iter()
        .map(|p| conjugate_gradient(sys, p.data()).map(|s| s.solution))
        .collect::<Result<Vec<_>>>()?;
    let planes = planes
        .into_iter()
        .map(|p| Image::new(f.width(), f.height(), 1, p))
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(&planes)
}

/// Output of [`conjugate_gradient`].
#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Preconditioner used by [`conjugate_gradient_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    /// Diagonal scaling; cheap and effective when edge weights span many decades.
    Jacobi,
}

/// Jacobi-preconditioned CG; see [`conjugate_gradient_with`].
pub fn conjugate_gradient(sys: &SparseSystem, b: &[f64]) -> Result<CgSolution> {
    conjugate_gradient_with(sys, b, Preconditioner::Jacobi)
}

/// (P)CG from the initial guess `x = b`, capped at `10 n` iterations.
///
/// Stops on the unpreconditioned relative residual `||b - A x|| / ||b||`,
/// recomputed from scratch before a solution is accepted.
pub fn conjugate_gradient_with(sys: &SparseSystem, b: &[f64], pre: Preconditioner) -> Result<CgSolution> {
    let n = sys.n;
    if b.len() != n {
        return Err(Error::Length {
            expected: n,
            actual: b.len(),
        });
    }
    let norm_b = norm(b);
    if norm_b == 0.0 {
        return Ok(CgSolution {
            solution: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = match pre {
        Preconditioner::None => vec![1.0; n],
        Preconditioner::Jacobi => (0..n).map(|i| 1.0 / sys.diagonal(i)).collect(),
    };
    let cap = 10 * n;
    let mut x = b.to_vec();
    let mut ap = vec![0.0; n];
    sys.apply_into(&x, &mut ap);
    let mut res: Vec<f64> = b.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = res.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&res, &z);
    let mut iterations = 0;
    loop {
        if norm(&res) <= CG_TOLERANCE * norm_b {
            sys.apply_into(&x, &mut ap);
            for i in 0..n {
                res[i] = b[i] - ap[i];
            }
            let true_rel = norm(&res) / norm_b;
            if true_rel <= CG_TOLERANCE {
                return Ok(CgSolution {
                    solution: x,
                    iterations,
                    residual: true_rel,
                });
            }
            // Recurrence drifted from the true residual: restart from it.
            for i in 0..n {
                z[i] = res[i] * inv_diag[i];
            }
            p.copy_from_slice(&z);
            rz = dot(&res, &z);
        }
        if iterations >= cap {
            return Err(Error::NoConvergence {
                iterations,
                residual: norm(&res) / norm_b,
            });
        }
        sys.apply_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NoConvergence {
                iterations,
                residual: norm(&res) / norm_b,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            res[i] -= alpha * ap[i];
            z[i] = res[i] * inv_diag[i];
        }
        let rz_next = dot(&res, &z);
        let beta = rz_next / rz;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_next;
        iterations += 1;
    }
}

/// WLS energy of `u` for target `f` under `guidance`, summed over channels.
pub fn wls_energy(u: &Image, f: &Image, guidance: &Image, lambda: f64, r: usize, weight: &WeightParams) -> Result<f64> {
    if !u.same_size(f) || u.channels() != f.channels() || !u.same_size(guidance) {
        return Err(Error::Dimensions("energy operands differ in size".into()));
    }
    let sys = assemble_full(guidance, lambda, r, weight)?;
    Ok(u
        .planes()
        .iter()
        .zip(f.planes())
        .map(|(up, fp)| sys.energy(up.data(), fp.data()))
        .sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
