//! Orthonormal polynomial bases built in physical coordinates.
//!
//! Each basis is a set of shifted and scaled monomials `ξ = A (x - x0)`
//! (graded-lexicographic order) orthonormalized against the element `L2`
//! inner product. Because the orthonormalization runs degree by degree, the
//! first `dim P_j` functions of a degree-`k` basis span `P_j` for every
//! `j <= k`; callers rely on this to take lower-degree sub-bases as prefixes.

use nalgebra::{DMatrix, Matrix3};

use super::quadrature::{quad_seg, quad_tet, quad_tri};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Tet,
    Tri,
    Seg,
}

impl Cell {
    pub fn dim(self) -> usize {
        match self {
            Cell::Tet => 3,
            Cell::Tri => 2,
            Cell::Seg => 1,
        }
    }
}

/// `dim P_j` on a cell of dimension `d`.
pub fn poly_dim(d: usize, j: usize) -> usize {
    match d {
        3 => (j + 1) * (j + 2) * (j + 3) / 6,
        2 => (j + 1) * (j + 2) / 2,
        1 => j + 1,
        _ => 1,
    }
}

/// Exponents of all monomials of total degree `<= j` in `d` variables,
/// graded, then lexicographically descending within a degree.
pub fn monomial_exponents(d: usize, j: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::with_capacity(poly_dim(d, j));
    for total in 0..=j {
        out.extend(homogeneous_exponents(d, total));
    }
    out
}

/// Exponents of the monomials of total degree exactly `j`.
pub fn homogeneous_exponents(d: usize, j: usize) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    match d {
        1 => out.push([j as u8, 0, 0]),
        2 => {
            for a in (0..=j).rev() {
                out.push([a as u8, (j - a) as u8, 0]);
            }
        }
        3 => {
            for a in (0..=j).rev() {
                for b in (0..=(j - a)).rev() {
                    out.push([a as u8, b as u8, (j - a - b) as u8]);
                }
            }
        }
        _ => {}
    }
    out
}

/// Affine local coordinates `ξ = axes · (x - origin)`.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub origin: Vec3,
    /// Rows of the map; only the first `dim` are used.
    pub axes: [Vec3; 3],
    pub dim: usize,
}

impl LocalFrame {
    pub fn local(&self, x: &Vec3) -> [f64; 3] {
        let r = x - self.origin;
        let mut xi = [0.0; 3];
        for i in 0..self.dim {
            xi[i] = self.axes[i].dot(&r);
        }
        xi
    }
}

fn powers(xi: f64, max: usize, out: &mut [f64; 16]) {
    out[0] = 1.0;
    for p in 1..=max {
        out[p] = out[p - 1] * xi;
    }
}

/// Raw monomial table evaluated at one point.
struct MonomialEval {
    pw: [[f64; 16]; 3],
}

impl MonomialEval {
    fn new(xi: &[f64; 3], degree: usize) -> Self {
        let mut pw = [[0.0; 16]; 3];
        for i in 0..3 {
            powers(xi[i], degree, &mut pw[i]);
        }
        Self { pw }
    }

    fn value(&self, e: &[u8; 3]) -> f64 {
        self.pw[0][e[0] as usize] * self.pw[1][e[1] as usize] * self.pw[2][e[2] as usize]
    }

    fn dpow(&self, axis: usize, p: u8) -> f64 {
        if p == 0 {
            0.0
        } else {
            p as f64 * self.pw[axis][p as usize - 1]
        }
    }

    fn ddpow(&self, axis: usize, p: u8) -> f64 {
        if p < 2 {
            0.0
        } else {
            (p as f64) * (p as f64 - 1.0) * self.pw[axis][p as usize - 2]
        }
    }

    fn pow(&self, axis: usize, p: u8) -> f64 {
        self.pw[axis][p as usize]
    }

    /// Gradient with respect to ξ.
    fn gradient(&self, e: &[u8; 3]) -> [f64; 3] {
        [
            self.dpow(0, e[0]) * self.pow(1, e[1]) * self.pow(2, e[2]),
            self.pow(0, e[0]) * self.dpow(1, e[1]) * self.pow(2, e[2]),
            self.pow(0, e[0]) * self.pow(1, e[1]) * self.dpow(2, e[2]),
        ]
    }

    /// Hessian with respect to ξ.
    fn hessian(&self, e: &[u8; 3]) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in a..3 {
                let mut v = 1.0;
                for axis in 0..3 {
                    let p = e[axis];
                    v *= if a == b && axis == a {
                        self.ddpow(axis, p)
                    } else if axis == a || axis == b {
                        self.dpow(axis, p)
                    } else {
                        self.pow(axis, p)
                    };
                }
                h[a][b] = v;
                h[b][a] = v;
            }
        }
        h
    }
}

/// Scalar polynomial basis of `P_j` on one cell.
#[derive(Debug, Clone)]
pub struct ScalarBasis {
    cell: Cell,
    degree: usize,
    frame: LocalFrame,
    exponents: Vec<[u8; 3]>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: DMatrix<f64>,
}

impl ScalarBasis {
    fn raw(cell: Cell, degree: usize, frame: LocalFrame) -> Self {
        let exponents = monomial_exponents(cell.dim(), degree);
        let n = exponents.len();
        Self { cell, degree, frame, exponents, coeffs: DMatrix::identity(n, n) }
    }

    fn tet_frame(verts: &[Vec3; 4]) -> LocalFrame {
        let origin = (verts[0] + verts[1] + verts[2] + verts[3]) / 4.0;
        let mut h: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                h = h.max((verts[i] - verts[j]).norm());
            }
        }
        LocalFrame { origin, axes: [Vec3::x() / h, Vec3::y() / h, Vec3::z() / h], dim: 3 }
    }

    fn tri_frame(verts: &[Vec3; 3], t1: &Vec3, t2: &Vec3) -> LocalFrame {
        let origin = (verts[0] + verts[1] + verts[2]) / 3.0;
        let h = (verts[0] - verts[1])
            .norm()
            .max((verts[1] - verts[2]).norm())
            .max((verts[0] - verts[2]).norm());
        LocalFrame { origin, axes: [t1 / h, t2 / h, Vec3::zeros()], dim: 2 }
    }

    fn seg_frame(verts: &[Vec3; 2]) -> LocalFrame {
        let origin = (verts[0] + verts[1]) / 2.0;
        let d = verts[1] - verts[0];
        let len = d.norm();
        LocalFrame { origin, axes: [d / (len * len), Vec3::zeros(), Vec3::zeros()], dim: 1 }
    }

    /// Scaled monomials on a tetrahedron (not orthonormalized).
    pub fn tet_monomials(verts: &[Vec3; 4], degree: usize) -> Self {
        Self::raw(Cell::Tet, degree, Self::tet_frame(verts))
    }

    /// Scaled monomials on a triangle in the in-plane frame `(t1, t2)`.
    pub fn tri_monomials(verts: &[Vec3; 3], t1: &Vec3, t2: &Vec3, degree: usize) -> Self {
        Self::raw(Cell::Tri, degree, Self::tri_frame(verts, t1, t2))
    }

    pub fn seg_monomials(verts: &[Vec3; 2], degree: usize) -> Self {
        Self::raw(Cell::Seg, degree, Self::seg_frame(verts))
    }

    pub fn on_tet(verts: &[Vec3; 4], volume: f64, degree: usize) -> Result<Self> {
        let mut b = Self::tet_monomials(verts, degree);
        let q = quad_tet(2 * degree)?;
        let pts: Vec<(Vec3, f64)> = q.mapped(verts, volume).collect();
        b.orthonormalize(&pts)?;
        Ok(b)
    }

    pub fn on_tri(verts: &[Vec3; 3], area: f64, t1: &Vec3, t2: &Vec3, degree: usize) -> Result<Self> {
        let mut b = Self::tri_monomials(verts, t1, t2, degree);
        let q = quad_tri(2 * degree)?;
        let pts: Vec<(Vec3, f64)> = q.mapped(verts, area).collect();
        b.orthonormalize(&pts)?;
        Ok(b)
    }

    pub fn on_seg(verts: &[Vec3; 2], degree: usize) -> Result<Self> {
        let mut b = Self::seg_monomials(verts, degree);
        let len = (verts[1] - verts[0]).norm();
        let q = quad_seg(2 * degree)?;
        let pts: Vec<(Vec3, f64)> = q.mapped(verts, len).collect();
        b.orthonormalize(&pts)?;
        Ok(b)
    }

    /// Two passes of Cholesky-based Gram–Schmidt against the discrete inner
    /// product given by `pts`.
    fn orthonormalize(&mut self, pts: &[(Vec3, f64)]) -> Result<()> {
        for _ in 0..2 {
            let gram = self.gram(pts);
            let chol = gram
                .cholesky()
                .ok_or_else(|| Error::AssemblyFailure("basis Gram matrix is not positive definite".into()))?;
            let l = chol.l();
            let linv = l
                .solve_lower_triangular(&DMatrix::identity(self.len(), self.len()))
                .ok_or_else(|| Error::AssemblyFailure("singular basis Gram factor".into()))?;
            self.coeffs = &linv * &self.coeffs;
        }
        Ok(())
    }

    pub fn gram(&self, pts: &[(Vec3, f64)]) -> DMatrix<f64> {
        let n = self.len();
        let mut g = DMatrix::zeros(n, n);
        let mut v = vec![0.0; n];
        for (x, w) in pts {
            self.values(x, &mut v);
            for i in 0..n {
                for j in 0..=i {
                    g[(i, j)] += w * v[i] * v[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g[(j, i)] = g[(i, j)];
            }
        }
        g
    }

    pub fn cell(&self) -> Cell {
        self.cell
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    pub fn values(&self, x: &Vec3, out: &mut [f64]) {
        let m = MonomialEval::new(&self.frame.local(x), self.degree);
        let raw: Vec<f64> = self.exponents.iter().map(|e| m.value(e)).collect();
        for (i, o) in out.iter_mut().enumerate().take(self.len()) {
            // coefficient matrix is lower triangular
            let mut s = 0.0;
            for j in 0..=i {
                s += self.coeffs[(i, j)] * raw[j];
            }
            *o = s;
        }
    }

    pub fn eval(&self, x: &Vec3) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        self.values(x, &mut v);
        v
    }

    pub fn gradients(&self, x: &Vec3, out: &mut [Vec3]) {
        let m = MonomialEval::new(&self.frame.local(x), self.degree);
        let raw: Vec<Vec3> = self
            .exponents
            .iter()
            .map(|e| {
                let g = m.gradient(e);
                let mut v = Vec3::zeros();
                for a in 0..self.frame.dim {
                    v += g[a] * self.frame.axes[a];
                }
                v
            })
            .collect();
        for (i, o) in out.iter_mut().enumerate().take(self.len()) {
            let mut s = Vec3::zeros();
            for j in 0..=i {
                s += self.coeffs[(i, j)] * raw[j];
            }
            *o = s;
        }
    }

    pub fn hessians(&self, x: &Vec3, out: &mut [Matrix3<f64>]) {
        let m = MonomialEval::new(&self.frame.local(x), self.degree);
        let d = self.frame.dim;
        let raw: Vec<Matrix3<f64>> = self
            .exponents
            .iter()
            .map(|e| {
                let h = m.hessian(e);
                let mut out = Matrix3::zeros();
                for a in 0..d {
                    for b in 0..d {
                        if h[a][b] != 0.0 {
                            out += h[a][b] * self.frame.axes[a] * self.frame.axes[b].transpose();
                        }
                    }
                }
                out
            })
            .collect();
        for (i, o) in out.iter_mut().enumerate().take(self.len()) {
            let mut s = Matrix3::zeros();
            for j in 0..=i {
                s += self.coeffs[(i, j)] * raw[j];
            }
            *o = s;
        }
    }
}

/// Vector basis `{φ_a d_c}` built from a scalar basis and fixed directions:
/// the Cartesian axes on a tet, the face frame `(t1, t2)` on a face.
/// Function `c * n + a` is `φ_a d_c`.
#[derive(Debug, Clone)]
pub struct VectorBasis {
    pub scalar: ScalarBasis,
    pub directions: Vec<Vec3>,
}

impl VectorBasis {
    pub fn cartesian(scalar: ScalarBasis) -> Self {
        Self { scalar, directions: vec![Vec3::x(), Vec3::y(), Vec3::z()] }
    }

    pub fn tangential(scalar: ScalarBasis, t1: Vec3, t2: Vec3) -> Self {
        Self { scalar, directions: vec![t1, t2] }
    }

    pub fn len(&self) -> usize {
        self.scalar.len() * self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self, x: &Vec3) -> Vec<Vec3> {
        let phi = self.scalar.eval(x);
        self.directions
            .iter()
            .flat_map(|d| phi.iter().map(move |p| *p * d))
            .collect()
    }

    pub fn curls(&self, x: &Vec3) -> Vec<Vec3> {
        let mut g = vec![Vec3::zeros(); self.scalar.len()];
        self.scalar.gradients(x, &mut g);
        self.directions
            .iter()
            .flat_map(|d| g.iter().map(move |gi| gi.cross(d)))
            .collect()
    }

    pub fn divergences(&self, x: &Vec3) -> Vec<f64> {
        let mut g = vec![Vec3::zeros(); self.scalar.len()];
        self.scalar.gradients(x, &mut g);
        self.directions
            .iter()
            .flat_map(|d| g.iter().map(move |gi| gi.dot(d)))
            .collect()
    }

    /// `curl curl (φ d) = H d - tr(H) d`.
    pub fn curl_curls(&self, x: &Vec3) -> Vec<Vec3> {
        let mut h = vec![Matrix3::zeros(); self.scalar.len()];
        self.scalar.hessians(x, &mut h);
        self.directions
            .iter()
            .flat_map(|d| h.iter().map(move |hi| hi * d - hi.trace() * d))
            .collect()
    }

    /// Evaluates `Σ c_i ψ_i(x)`.
    pub fn combine(&self, coeffs: &[f64], x: &Vec3) -> Vec3 {
        let phi = self.scalar.eval(x);
        let n = phi.len();
        let mut v = Vec3::zeros();
        for (c, d) in self.directions.iter().enumerate() {
            let s: f64 = phi.iter().zip(&coeffs[c * n..(c + 1) * n]).map(|(p, a)| p * a).sum();
            v += s * d;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ref_tet() -> [Vec3; 4] {
        [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()]
    }

    fn l2_project_vec(basis: &VectorBasis, verts: &[Vec3; 4], f: impl Fn(&Vec3) -> Vec3) -> Vec<f64> {
        // basis is orthonormal, so coefficients are plain moments
        let q = quad_tet(2 * basis.scalar.degree() + 2).unwrap();
        let vol = crate::geometry::tet_signed_volume(&verts[0], &verts[1], &verts[2], &verts[3]);
        let mut c = vec![0.0; basis.len()];
        for (x, w) in q.mapped(verts, vol) {
            let fv = f(&x);
            for (ci, v) in c.iter_mut().zip(basis.values(&x)) {
                *ci += w * fv.dot(&v);
            }
        }
        c
    }

    #[test]
    fn dimensions() {
        assert_eq!(monomial_exponents(3, 2).len(), 10);
        assert_eq!(monomial_exponents(2, 3).len(), 10);
        assert_eq!(monomial_exponents(1, 4).len(), 5);
        assert_eq!(homogeneous_exponents(3, 2).len(), 6);
        let b = ScalarBasis::on_tet(&ref_tet(), 1.0 / 6.0, 2).unwrap();
        assert_eq!(b.len(), 10);
    }

    #[test]
    fn constant_vector_has_zero_curl() {
        let v = ref_tet();
        let b = VectorBasis::cartesian(ScalarBasis::on_tet(&v, 1.0 / 6.0, 0).unwrap());
        for c in b.curls(&Vec3::new(0.2, 0.1, 0.3)) {
            assert_eq!(c.norm(), 0.0);
        }
    }

    #[test]
    fn identity_field_has_divergence_three_and_rotation_curl() {
        let v = ref_tet();
        let b = VectorBasis::cartesian(ScalarBasis::on_tet(&v, 1.0 / 6.0, 1).unwrap());
        let id = l2_project_vec(&b, &v, |x| *x);
        let rot = l2_project_vec(&b, &v, |x| Vec3::new(-x.y, x.x, 0.0));
        for x in [Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.5, 0.1, 0.05)] {
            let div: f64 = b.divergences(&x).iter().zip(&id).map(|(d, c)| d * c).sum();
            assert!((div - 3.0).abs() < 1e-12);
            let curl: Vec3 = b.curls(&x).iter().zip(&rot).map(|(d, c)| *d * *c).sum();
            assert!((curl - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn face_vector_basis_is_tangential() {
        let verts = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 1.0)];
        let n = (verts[1] - verts[0]).cross(&(verts[2] - verts[0])).normalize();
        let t1 = (verts[1] - verts[0]).normalize();
        let t2 = n.cross(&t1);
        let area = crate::geometry::triangle_area(&verts[0], &verts[1], &verts[2]);
        let b = VectorBasis::tangential(ScalarBasis::on_tri(&verts, area, &t1, &t2, 2).unwrap(), t1, t2);
        assert_eq!(b.len(), 12);
        for v in b.values(&Vec3::new(0.3, 0.3, 0.6)) {
            assert!(v.dot(&n).abs() < 1e-14);
        }
    }

    #[test]
    fn prefix_spans_lower_degree() {
        let v = ref_tet();
        let b2 = ScalarBasis::on_tet(&v, 1.0 / 6.0, 2).unwrap();
        let b1 = ScalarBasis::on_tet(&v, 1.0 / 6.0, 1).unwrap();
        for x in [Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.7, 0.1, 0.1)] {
            let a = b2.eval(&x);
            let c = b1.eval(&x);
            for i in 0..4 {
                assert!((a[i] - c[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curl_curl_lowers_degree_by_two() {
        // curl curl of a degree-k field is reproduced by its projection onto degree k-2
        let v = [
            Vec3::new(0.1, 0.0, 0.2),
            Vec3::new(1.2, 0.1, 0.0),
            Vec3::new(0.0, 0.9, 0.3),
            Vec3::new(0.2, 0.1, 1.1),
        ];
        let vol = crate::geometry::tet_signed_volume(&v[0], &v[1], &v[2], &v[3]);
        for k in 2..=3 {
            let hi = VectorBasis::cartesian(ScalarBasis::on_tet(&v, vol, k).unwrap());
            let lo = VectorBasis::cartesian(ScalarBasis::on_tet(&v, vol, k - 2).unwrap());
            for i in 0..hi.len() {
                let f = |x: &Vec3| hi.curl_curls(x)[i];
                let c = l2_project_vec(&lo, &v, f);
                let q = quad_tet(2 * k + 2).unwrap();
                let mut res = 0.0;
                for (x, w) in q.mapped(&v, vol) {
                    res += w * (f(&x) - lo.combine(&c, &x)).norm_squared();
                }
                assert!(res.sqrt() < 1e-10, "k={k} i={i} residual {}", res.sqrt());
            }
        }
    }

    fn jittered_tet(j: [f64; 12]) -> [Vec3; 4] {
        let base = ref_tet();
        let mut out = base;
        for i in 0..4 {
            out[i] += 0.15 * Vec3::new(j[3 * i], j[3 * i + 1], j[3 * i + 2]);
        }
        out
    }

    proptest! {
        #[test]
        fn orthonormal_on_jittered_tets(j in proptest::array::uniform12(-1.0f64..1.0), k in 0usize..=3) {
            let mut v = jittered_tet(j);
            let mut vol = crate::geometry::tet_signed_volume(&v[0], &v[1], &v[2], &v[3]);
            if vol < 0.0 { v.swap(2, 3); vol = -vol; }
            prop_assume!(vol > 1e-3);
            let b = ScalarBasis::on_tet(&v, vol, k).unwrap();
            let q = quad_tet(2 * k).unwrap();
            let pts: Vec<(Vec3, f64)> = q.mapped(&v, vol).collect();
            let g = b.gram(&pts);
            let err = (g - DMatrix::<f64>::identity(b.len(), b.len())).abs().max();
            prop_assert!(err < 1e-10, "gram error {err}");
        }

        #[test]
        fn gradients_match_finite_differences(
            j in proptest::array::uniform12(-1.0f64..1.0),
            c in proptest::collection::vec(-1.0f64..1.0, 20),
            p in proptest::array::uniform3(0.1f64..0.3),
        ) {
            let mut v = jittered_tet(j);
            let mut vol = crate::geometry::tet_signed_volume(&v[0], &v[1], &v[2], &v[3]);
            if vol < 0.0 { v.swap(2, 3); vol = -vol; }
            prop_assume!(vol > 1e-3);
            let b = ScalarBasis::on_tet(&v, vol, 3).unwrap();
            let f = |x: &Vec3| -> f64 { b.eval(x).iter().zip(&c).map(|(a, b)| a * b).sum() };
            let x = Vec3::new(p[0], p[1], p[2]);
            let mut g = vec![Vec3::zeros(); b.len()];
            b.gradients(&x, &mut g);
            let grad: Vec3 = g.iter().zip(&c).map(|(gi, ci)| *gi * *ci).sum();
            let step = 1e-6;
            for axis in 0..3 {
                let mut e = Vec3::zeros();
                e[axis] = step;
                let fd = (f(&(x + e)) - f(&(x - e))) / (2.0 * step);
                prop_assert!((fd - grad[axis]).abs() < 1e-6);
            }
        }
    }
}
