use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::dense::DenseLu;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Relative residual target `‖b - Ax‖ / ‖b‖`.
    pub tol: f64,
    /// Krylov dimension per cycle.
    pub restart: usize,
    /// Total iteration cap.
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-10, restart: 100, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Explicitly recomputed `‖b - Ax‖ / ‖b‖` of the returned iterate.
    pub relative_residual: f64,
    pub seconds: f64,
    pub converged: bool,
    /// Arnoldi residual estimate after every iteration.
    pub history: Vec<f64>,
    /// Iteration index at which each restart cycle began.
    pub cycle_starts: Vec<usize>,
}

pub trait Preconditioner: Sync {
    /// `z = M^{-1} r`.
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Exact inverses of the diagonal blocks of fixed size (the trailing block
/// may be shorter).
pub struct BlockJacobi {
    block: usize,
    inverses: Vec<DMatrix<f64>>,
}

impl BlockJacobi {
    pub fn new(a: &CsrMatrix, block: usize) -> Result<Self> {
        if block == 0 {
            return Err(Error::InvalidParameter("block size must be positive".into()));
        }
        let n = a.nrows;
        let inverses = (0..n.div_ceil(block))
            .into_par_iter()
            .map(|b| {
                let start = b * block;
                let size = block.min(n - start);
                let mut d = DMatrix::zeros(size, size);
                for i in 0..size {
                    let (cols, vals) = a.row(start + i);
                    for (&c, &v) in cols.iter().zip(vals) {
                        if c >= start && c < start + size {
                            d[(i, c - start)] = v;
                        }
                    }
                }
                let lu = DenseLu::new(d)?;
                Ok(lu.solve_matrix(&DMatrix::identity(size, size)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { block, inverses })
    }
}

impl Preconditioner for BlockJacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.par_chunks_mut(self.block)
            .zip(r.par_chunks(self.block))
            .zip(self.inverses.par_iter())
            .for_each(|((zb, rb), inv)| {
                for i in 0..zb.len() {
                    let mut s = 0.0;
                    for j in 0..rb.len() {
                        s += inv[(i, j)] * rb[j];
                    }
                    zb[i] = s;
                }
            });
    }
}

const CHUNK: usize = 4096;

/// Dot product with a reduction order independent of the thread schedule.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.par_chunks_mut(CHUNK).zip(x.par_chunks(CHUNK)).for_each(|(ys, xs)| {
        for (yi, xi) in ys.iter_mut().zip(xs) {
            *yi += alpha * xi;
        }
    });
}

fn residual(a: &CsrMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = a.mul(x);
    r.par_iter_mut().zip(b.par_iter()).for_each(|(ri, bi)| *ri = bi - *ri);
    r
}

/// Restarted GMRES with right preconditioning and Givens rotations.
///
/// Returns the iterate and its report; fails with [`Error::SolverFailure`]
/// when the explicit residual does not reach `tol` within `max_iter`.
pub fn gmres(
    a: &CsrMatrix,
    b: &[f64],
    opts: &GmresOptions,
    precond: &dyn Preconditioner,
) -> Result<(Vec<f64>, SolveReport)> {
    if a.nrows != a.ncols {
        return Err(Error::DimensionMismatch { expected: a.nrows, got: a.ncols });
    }
    if b.len() != a.nrows {
        return Err(Error::DimensionMismatch { expected: a.nrows, got: b.len() });
    }
    let start = Instant::now();
    let n = b.len();
    let mut report = SolveReport::default();
    let mut x = vec![0.0; n];
    let bnorm = norm(b);
    if bnorm == 0.0 {
        report.converged = true;
        report.seconds = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }
    let m = opts.restart.max(1).min(n.max(1));
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];

    loop {
        let mut r = residual(a, b, &x);
        let beta = norm(&r);
        report.relative_residual = beta / bnorm;
        if report.relative_residual <= opts.tol {
            report.converged = true;
            break;
        }
        if report.iterations >= opts.max_iter {
            break;
        }
        report.cycle_starts.push(report.iterations);

        r.iter_mut().for_each(|v| *v /= beta);
        let mut basis: Vec<Vec<f64>> = vec![r];
        let mut hess = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut used = 0;

        for j in 0..m {
            precond.apply(&basis[j], &mut z);
            a.matvec(&z, &mut w);
            for (i, v) in basis.iter().enumerate() {
                let h = dot(&w, v);
                hess[i][j] = h;
                axpy(-h, v, &mut w);
            }
            let hn = norm(&w);
            hess[j + 1][j] = hn;
            for i in 0..j {
                let t = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
                hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
                hess[i][j] = t;
            }
            let denom = hess[j][j].hypot(hess[j + 1][j]);
            if denom == 0.0 {
                break;
            }
            cs[j] = hess[j][j] / denom;
            sn[j] = hess[j + 1][j] / denom;
            hess[j][j] = denom;
            hess[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            report.iterations += 1;
            let est = g[j + 1].abs() / bnorm;
            report.history.push(est);
            if est <= opts.tol || report.iterations >= opts.max_iter || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }

        // back substitution for y, then x += M^{-1} V y
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in (i + 1)..used {
                s -= hess[i][k] * y[k];
            }
            y[i] = s / hess[i][i];
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            axpy(*yi, v, &mut update);
        }
        precond.apply(&update, &mut z);
        axpy(1.0, &z, &mut x);
        if used == 0 {
            // breakdown on the first step: no further progress possible
            report.relative_residual = norm(&residual(a, b, &x)) / bnorm;
            report.converged = report.relative_residual <= opts.tol;
            break;
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    if report.converged {
        Ok((x, report))
    } else {
        Err(Error::SolverFailure { report })
    }
}
