use nalgebra::{DMatrix, DVector};

use super::dense::DenseLu;
use super::gmres::Preconditioner;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Block incomplete LU without fill over a fixed block size.
///
/// The block sparsity pattern is read off the CSR matrix; factors are kept
/// as dense blocks, with `U_ii` stored inverted.
pub struct BlockIlu0 {
    block: usize,
    n: usize,
    /// Per block row: block columns, ascending.
    cols: Vec<Vec<usize>>,
    /// Per block row: blocks aligned with `cols`; strictly lower blocks
    /// hold `L`, the rest hold `U`.
    blocks: Vec<Vec<DMatrix<f64>>>,
    diag_pos: Vec<usize>,
    diag_inv: Vec<DMatrix<f64>>,
}

impl BlockIlu0 {
    pub fn new(a: &CsrMatrix, block: usize) -> Result<Self> {
        if block == 0 {
            return Err(Error::InvalidParameter("block size must be positive".into()));
        }
        if a.nrows != a.ncols {
            return Err(Error::DimensionMismatch { expected: a.nrows, got: a.ncols });
        }
        let n = a.nrows;
        let nb = n.div_ceil(block);
        let size = |b: usize| block.min(n - b * block);

        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); nb];
        for (bi, c) in cols.iter_mut().enumerate() {
            for i in bi * block..bi * block + size(bi) {
                c.extend(a.row(i).0.iter().map(|&j| j / block));
            }
            c.push(bi);
            c.sort_unstable();
            c.dedup();
        }
        let mut blocks: Vec<Vec<DMatrix<f64>>> = cols
            .iter()
            .enumerate()
            .map(|(bi, c)| c.iter().map(|&bj| DMatrix::zeros(size(bi), size(bj))).collect())
            .collect();
        for bi in 0..nb {
            for li in 0..size(bi) {
                let (cj, vals) = a.row(bi * block + li);
                for (&j, &v) in cj.iter().zip(vals) {
                    let p = cols[bi].binary_search(&(j / block)).expect("pattern built from rows");
                    blocks[bi][p][(li, j % block)] = v;
                }
            }
        }
        let diag_pos: Vec<usize> =
            cols.iter().enumerate().map(|(bi, c)| c.binary_search(&bi).expect("diagonal inserted")).collect();

        let mut diag_inv: Vec<DMatrix<f64>> = Vec::with_capacity(nb);
        for bi in 0..nb {
            for p in 0..diag_pos[bi] {
                let bk = cols[bi][p];
                let (done, rest) = blocks.split_at_mut(bi);
                let row = &mut rest[0];
                let lik = &row[p] * &diag_inv[bk];
                // A_ij -= L_ik U_kj for j > k present in both rows
                for q in (diag_pos[bk] + 1)..cols[bk].len() {
                    if let Ok(pj) = cols[bi].binary_search(&cols[bk][q]) {
                        row[pj] -= &lik * &done[bk][q];
                    }
                }
                row[p] = lik;
            }
            let d = blocks[bi][diag_pos[bi]].clone();
            let s = d.nrows();
            diag_inv.push(DenseLu::new(d)?.solve_matrix(&DMatrix::identity(s, s)));
        }
        Ok(Self { block, n, cols, blocks, diag_pos, diag_inv })
    }
}

impl Preconditioner for BlockIlu0 {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let nb = self.cols.len();
        let seg = |v: &[f64], b: usize| {
            let s = b * self.block;
            DVector::from_column_slice(&v[s..(s + self.block).min(self.n)])
        };
        let mut y: Vec<DVector<f64>> = Vec::with_capacity(nb);
        for bi in 0..nb {
            let mut acc = seg(r, bi);
            for p in 0..self.diag_pos[bi] {
                acc -= &self.blocks[bi][p] * &y[self.cols[bi][p]];
            }
            y.push(acc);
        }
        for bi in (0..nb).rev() {
            let mut acc = y[bi].clone();
            for p in (self.diag_pos[bi] + 1)..self.cols[bi].len() {
                let bj = self.cols[bi][p];
                acc -= &self.blocks[bi][p] * &y[bj];
            }
            y[bi] = &self.diag_inv[bi] * acc;
        }
        for (bi, yb) in y.iter().enumerate() {
            let s = bi * self.block;
            z[s..s + yb.len()].copy_from_slice(yb.as_slice());
        }
    }
}
