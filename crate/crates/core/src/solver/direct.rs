use dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::lblt::factor::LbltParams;
use faer::perm::PermRef;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, IntranodeLbltRef, SymbolicCholesky};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, MatMut, Par};

use super::gmres::Preconditioner;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Sparse symmetric indefinite `L B L^T` factorization (approximate minimum
/// degree ordering, Bunch-Kaufman pivoting inside supernodes).
///
/// Pivoting is restricted, so the factorization is used as a preconditioner
/// and GMRES removes whatever accuracy is lost; on the condensed systems it
/// typically converges in one or two steps.
pub struct SparseLblt {
    n: usize,
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    subdiag: Vec<f64>,
    perm_fwd: Vec<usize>,
    perm_inv: Vec<usize>,
}

impl SparseLblt {
    /// Factors `a`, which must be symmetric; only its lower triangle is read.
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(Error::DimensionMismatch { expected: a.nrows, got: a.ncols });
        }
        let n = a.nrows;
        // CSR of a symmetric matrix doubles as its CSC
        let sym = SymbolicSparseColMatRef::new_checked(n, n, &a.row_ptr, None, &a.col_idx);
        let mat = SparseColMatRef::new(sym, &a.values);
        let fail = |e| Error::AssemblyFailure(format!("sparse factorization: {e:?}"));
        let symbolic =
            factorize_symbolic_cholesky(sym, faer::Side::Lower, Default::default(), Default::default()).map_err(fail)?;
        let mut values = vec![0.0; symbolic.len_val()];
        let mut subdiag = vec![0.0; n];
        let mut perm_fwd = vec![0usize; n];
        let mut perm_inv = vec![0usize; n];
        let par = Par::rayon(0);
        let params: faer::Spec<LbltParams, f64> = Default::default();
        let mut mem = MemBuffer::new(symbolic.factorize_numeric_intranode_lblt_scratch::<f64>(par, params));
        symbolic.factorize_numeric_intranode_lblt(
            &mut values,
            &mut subdiag,
            &mut perm_fwd,
            &mut perm_inv,
            mat,
            faer::Side::Lower,
            par,
            MemStack::new(&mut mem),
            params,
        );
        if values.iter().chain(&subdiag).any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { n, symbolic, values, subdiag, perm_fwd, perm_inv })
    }
}

impl Preconditioner for SparseLblt {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        let perm = PermRef::new_checked(&self.perm_fwd, &self.perm_inv, self.n);
        let lblt = IntranodeLbltRef::new(&self.symbolic, &self.values, &self.subdiag, perm);
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        lblt.solve_in_place_with_conj(
            Conj::No,
            MatMut::from_column_major_slice_mut(z, self.n, 1),
            Par::Seq,
            MemStack::new(&mut mem),
        );
    }
}
