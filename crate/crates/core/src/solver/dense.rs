use nalgebra::{DMatrix, DVector, LU, Dyn};

use crate::error::{Error, Result};

/// Largest system [`dense_solve`] accepts.
pub const DENSE_SIZE_LIMIT: usize = 6000;

/// LU factorization with partial pivoting that rejects numerically singular
/// matrices (smallest pivot below `1e-14` of the largest).
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: LU<f64, Dyn, Dyn>,
}

impl DenseLu {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
        }
        let lu = a.lu();
        let u = lu.u();
        let diag = u.diagonal();
        let max = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let min = diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
        if diag.is_empty() || !(max > 0.0) || !(min > 1e-14 * max) || !min.is_finite() {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.lu.solve(b).expect("factorization checked for singularity")
    }

    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.lu.solve(b).expect("factorization checked for singularity")
    }
}

pub fn dense_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() > DENSE_SIZE_LIMIT {
        return Err(Error::SizeLimit { size: a.nrows(), limit: DENSE_SIZE_LIMIT });
    }
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
    }
    Ok(DenseLu::new(a.clone())?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_singular() {
        let b = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let x = dense_solve(&DMatrix::identity(3, 3), &b).unwrap();
        assert_eq!(x, b);
        let z = DMatrix::from_element(1, 1, 0.0);
        assert!(matches!(dense_solve(&z, &DVector::from_element(1, 1.0)), Err(Error::SingularMatrix)));
    }

    #[test]
    fn backward_error_small() {
        let n = 12;
        let a = DMatrix::from_fn(n, n, |i, j| 1.0 / (1.0 + i as f64 + 2.0 * j as f64) + if i == j { 1.0 } else { 0.0 });
        let b = DVector::from_fn(n, |i, _| (i as f64).sin());
        let x = dense_solve(&a, &b).unwrap();
        let r = (&a * &x - &b).norm() / (a.norm() * x.norm());
        assert!(r < 1e-12);
    }
}
