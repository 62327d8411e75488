//! The Raviart–Thomas-type spaces `D_j = [P_{j-1}]^d ⊕ P̃_{j-1} x`.

use super::basis::{homogeneous_exponents, Cell, ScalarBasis};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// `dim D_j` on a tet (`d = 3`) or a face (`d = 2`).
pub fn moment_dim(d: usize, j: usize) -> usize {
    match (d, j) {
        (_, 0) => 0,
        (3, j) => j * (j + 1) * (j + 3) / 2,
        (2, j) => j * (j + 2),
        _ => 0,
    }
}

/// Basis of `D_j` on a tet or a face.
///
/// On a face the fields are tangential: the vector part `[P_{j-1}]^2` uses
/// the face frame and `x` is the in-plane position relative to the centroid.
#[derive(Debug, Clone)]
pub struct MomentSpaceD {
    degree: usize,
    lower: ScalarBasis,
    directions: Vec<Vec3>,
    homogeneous: Vec<[u8; 3]>,
}

impl MomentSpaceD {
    pub fn on_tet(verts: &[Vec3; 4], j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidParameter("D_j needs j >= 1".into()));
        }
        Ok(Self {
            degree: j,
            lower: ScalarBasis::tet_monomials(verts, j - 1),
            directions: vec![Vec3::x(), Vec3::y(), Vec3::z()],
            homogeneous: homogeneous_exponents(3, j - 1),
        })
    }

    pub fn on_tri(verts: &[Vec3; 3], t1: &Vec3, t2: &Vec3, j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidParameter("D_j needs j >= 1".into()));
        }
        Ok(Self {
            degree: j,
            lower: ScalarBasis::tri_monomials(verts, t1, t2, j - 1),
            directions: vec![*t1, *t2],
            homogeneous: homogeneous_exponents(2, j - 1),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.lower.len() * self.directions.len() + self.homogeneous.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values of all basis fields at `x`.
    pub fn values(&self, x: &Vec3) -> Vec<Vec3> {
        let phi = self.lower.eval(x);
        let mut out = Vec::with_capacity(self.len());
        for d in &self.directions {
            out.extend(phi.iter().map(|p| *p * d));
        }
        let frame = self.lower.frame();
        let xi = frame.local(x);
        // ξ as a physical vector (the axes are orthogonal with equal scale)
        let mut pos = Vec3::zeros();
        for a in 0..frame.dim {
            let axis = frame.axes[a];
            pos += xi[a] * axis / axis.norm();
        }
        for e in &self.homogeneous {
            let m: f64 = (0..3).map(|a| xi[a].powi(e[a] as i32)).product();
            out.push(m * pos);
        }
        out
    }

    /// Divergence of each basis field (tets only).
    pub fn divergences(&self, x: &Vec3) -> Vec<f64> {
        debug_assert_eq!(self.lower.cell(), Cell::Tet);
        let mut g = vec![Vec3::zeros(); self.lower.len()];
        self.lower.gradients(x, &mut g);
        let mut out = Vec::with_capacity(self.len());
        for d in &self.directions {
            out.extend(g.iter().map(|gi| gi.dot(d)));
        }
        let frame = self.lower.frame();
        let xi = frame.local(x);
        let scale = frame.axes[0].norm();
        // div(m(ξ) ξ) = (deg m + 3) m / h by Euler's identity
        for e in &self.homogeneous {
            let m: f64 = (0..3).map(|a| xi[a].powi(e[a] as i32)).product();
            out.push((self.degree - 1 + 3) as f64 * m * scale);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polybasis::poly_dim;

    #[test]
    fn dimension_counts() {
        let tet = [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
        for j in 1..=4 {
            let d = MomentSpaceD::on_tet(&tet, j).unwrap();
            assert_eq!(d.len(), moment_dim(3, j));
            assert_eq!(d.len(), 3 * poly_dim(3, j - 1) + poly_dim(2, j - 1));
        }
        let tri = [Vec3::zeros(), Vec3::x(), Vec3::y()];
        for j in 1..=4 {
            let d = MomentSpaceD::on_tri(&tri, &Vec3::x(), &Vec3::y(), j).unwrap();
            assert_eq!(d.len(), moment_dim(2, j));
        }
        assert_eq!(moment_dim(2, 1), 3);
        assert_eq!(moment_dim(3, 1), 4);
        assert!(MomentSpaceD::on_tet(&tet, 0).is_err());
    }

    #[test]
    fn divergence_matches_finite_differences() {
        let tet = [Vec3::new(0.1, 0.0, 0.0), Vec3::x(), Vec3::y(), Vec3::new(0.0, 0.2, 1.0)];
        let d = MomentSpaceD::on_tet(&tet, 3).unwrap();
        let x = Vec3::new(0.2, 0.3, 0.1);
        let div = d.divergences(&x);
        let h = 1e-6;
        for (i, dv) in div.iter().enumerate() {
            let mut fd = 0.0;
            for a in 0..3 {
                let mut e = Vec3::zeros();
                e[a] = h;
                fd += (d.values(&(x + e))[i][a] - d.values(&(x - e))[i][a]) / (2.0 * h);
            }
            assert!((fd - dv).abs() < 1e-6, "field {i}: {fd} vs {dv}");
        }
    }
}
