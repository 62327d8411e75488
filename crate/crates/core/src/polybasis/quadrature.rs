//! Collapsed-coordinate Gauss rules on simplices.
//!
//! Points are stored in barycentric coordinates and weights sum to the
//! reference measure (1/6 on the tet, 1/2 on the triangle, 1 on the segment).
//! Rules are conical products of Gauss–Jacobi rules, so a degree-`d` rule uses
//! `ceil((d+1)/2)` points per collapsed direction.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Highest exactness degree the rule builders accept.
pub const MAX_QUAD_DEGREE: usize = 60;

#[derive(Debug, Clone)]
pub struct QuadRule<const N: usize> {
    pub points: Vec<[f64; N]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

pub type TetRule = QuadRule<4>;
pub type TriRule = QuadRule<3>;
pub type SegRule = QuadRule<2>;

impl<const N: usize> QuadRule<N> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn reference_measure() -> f64 {
        match N {
            4 => 1.0 / 6.0,
            3 => 0.5,
            _ => 1.0,
        }
    }

    /// Physical points and weights on the simplex spanned by `verts`, whose
    /// measure (volume, area or length) is `measure`.
    pub fn mapped<'a>(&'a self, verts: &'a [Vec3; N], measure: f64) -> impl Iterator<Item = (Vec3, f64)> + 'a {
        let scale = measure / Self::reference_measure();
        self.points.iter().zip(&self.weights).map(move |(bary, &w)| {
            let mut x = Vec3::zeros();
            for (l, v) in bary.iter().zip(verts) {
                x += *l * v;
            }
            (x, w * scale)
        })
    }
}

fn check_degree(deg: usize) -> Result<()> {
    if deg > MAX_QUAD_DEGREE {
        Err(Error::UnsupportedDegree { requested: deg, max: MAX_QUAD_DEGREE })
    } else {
        Ok(())
    }
}

/// Gauss–Jacobi nodes and weights on `[0, 1]` for the weight `(1 - t)^alpha`,
/// via the Golub–Welsch eigenvalue method.
fn gauss_jacobi_unit(npts: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    let a = alpha as f64;
    let b = 0.0;
    let mut jac = DMatrix::<f64>::zeros(npts, npts);
    for i in 0..npts {
        let n = i as f64;
        let s = 2.0 * n + a + b;
        jac[(i, i)] = if i == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if i + 1 < npts {
            let m = n + 1.0;
            let s = 2.0 * m + a + b;
            let off = (4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    // mu0 = int_{-1}^{1} (1-x)^a dx = 2^(a+1)/(a+1)
    let mu0 = 2f64.powi(alpha as i32 + 1) / (a + 1.0);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..npts)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (x, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    // map [-1,1] with (1-x)^a to [0,1] with (1-t)^a
    let scale = 1.0 / 2f64.powi(alpha as i32 + 1);
    let nodes = pairs.iter().map(|p| 0.5 * (1.0 + p.0)).collect();
    let weights = pairs.iter().map(|p| p.1 * scale).collect();
    (nodes, weights)
}

fn points_for(deg: usize) -> usize {
    deg / 2 + 1
}

pub fn quad_seg(deg: usize) -> Result<SegRule> {
    check_degree(deg)?;
    let (x, w) = gauss_jacobi_unit(points_for(deg), 0);
    Ok(QuadRule {
        points: x.iter().map(|&t| [1.0 - t, t]).collect(),
        weights: w,
        degree: deg,
    })
}

pub fn quad_tri(deg: usize) -> Result<TriRule> {
    check_degree(deg)?;
    let n = points_for(deg);
    let (xa, wa) = gauss_jacobi_unit(n, 0);
    let (xb, wb) = gauss_jacobi_unit(n, 1);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (b, wbv) in xb.iter().zip(&wb) {
        for (a, wav) in xa.iter().zip(&wa) {
            let x = a * (1.0 - b);
            let y = *b;
            points.push([1.0 - x - y, x, y]);
            weights.push(wav * wbv);
        }
    }
    Ok(QuadRule { points, weights, degree: deg })
}

pub fn quad_tet(deg: usize) -> Result<TetRule> {
    check_degree(deg)?;
    let n = points_for(deg);
    let (xa, wa) = gauss_jacobi_unit(n, 0);
    let (xb, wb) = gauss_jacobi_unit(n, 1);
    let (xc, wc) = gauss_jacobi_unit(n, 2);
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for (c, wcv) in xc.iter().zip(&wc) {
        for (b, wbv) in xb.iter().zip(&wb) {
            for (a, wav) in xa.iter().zip(&wa) {
                let z = *c;
                let y = b * (1.0 - c);
                let x = a * (1.0 - b) * (1.0 - c);
                points.push([1.0 - x - y - z, x, y, z]);
                weights.push(wav * wbv * wcv);
            }
        }
    }
    Ok(QuadRule { points, weights, degree: deg })
}
