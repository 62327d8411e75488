//! Projection operators onto the discrete polynomial spaces.
//!
//! Element and face `L2` projections use the orthonormal bases of
//! [`crate::polybasis`], so coefficients are plain moments. The H(div) and
//! H(curl) projections are defined by edge, face and interior moments and
//! are computed by solving the (small, square) moment system with dense LU.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{TetGeom, TriGeom, Vec3};
use crate::polybasis::{
    moment_dim, poly_dim, quad_seg, quad_tet, quad_tri, MomentSpaceD, ScalarBasis, VectorBasis,
};
use crate::solver::DenseLu;

/// Which discrete space a coefficient vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionTarget {
    ElementScalar { degree: usize },
    ElementVector { degree: usize },
    FaceScalar { degree: usize },
    /// Tangential fields `Σ (a_i t1 + b_i t2) φ_i` in the face frame.
    FaceTangential { degree: usize },
    /// `D_j(T)`.
    HDiv { degree: usize },
    /// `[P_j(T)]^3` with Nédélec (second kind) moments.
    HCurl { degree: usize },
}

impl ProjectionTarget {
    pub fn dim(&self) -> usize {
        match *self {
            ProjectionTarget::ElementScalar { degree } => poly_dim(3, degree),
            ProjectionTarget::ElementVector { degree } | ProjectionTarget::HCurl { degree } => {
                3 * poly_dim(3, degree)
            }
            ProjectionTarget::FaceScalar { degree } => poly_dim(2, degree),
            ProjectionTarget::FaceTangential { degree } => 2 * poly_dim(2, degree),
            ProjectionTarget::HDiv { degree } => moment_dim(3, degree),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionCoeffs {
    pub target: ProjectionTarget,
    pub coeffs: Vec<f64>,
}

impl ProjectionCoeffs {
    fn new(target: ProjectionTarget, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), target.dim());
        Self { target, coeffs }
    }
}

/// Quadrature exactness used for moments of non-polynomial data.
pub fn moment_quad_degree(j: usize) -> usize {
    (2 * j + 2).max(16)
}

fn tet_basis(tet: &TetGeom, degree: usize) -> Result<ScalarBasis> {
    ScalarBasis::on_tet(&tet.verts, tet.volume, degree)
}

/// Face basis of degree `degree`; lower-degree spaces use its prefix.
pub fn face_basis(face: &TriGeom, degree: usize) -> Result<ScalarBasis> {
    ScalarBasis::on_tri(&face.verts, face.area, &face.t1, &face.t2, degree)
}

pub fn l2_project_element(v: &dyn Fn(&Vec3) -> f64, tet: &TetGeom, j: usize) -> Result<ProjectionCoeffs> {
    let basis = tet_basis(tet, j)?;
    let q = quad_tet(moment_quad_degree(j))?;
    let mut c = vec![0.0; basis.len()];
    let mut phi = vec![0.0; basis.len()];
    for (x, w) in q.mapped(&tet.verts, tet.volume) {
        let fx = v(&x);
        basis.values(&x, &mut phi);
        for (ci, p) in c.iter_mut().zip(&phi) {
            *ci += w * fx * p;
        }
    }
    Ok(ProjectionCoeffs::new(ProjectionTarget::ElementScalar { degree: j }, c))
}

pub fn l2_project_element_vector(
    v: &dyn Fn(&Vec3) -> Vec3,
    tet: &TetGeom,
    j: usize,
) -> Result<ProjectionCoeffs> {
    let basis = VectorBasis::cartesian(tet_basis(tet, j)?);
    let q = quad_tet(moment_quad_degree(j))?;
    let mut c = vec![0.0; basis.len()];
    for (x, w) in q.mapped(&tet.verts, tet.volume) {
        let fx = v(&x);
        for (ci, p) in c.iter_mut().zip(basis.values(&x)) {
            *ci += w * fx.dot(&p);
        }
    }
    Ok(ProjectionCoeffs::new(ProjectionTarget::ElementVector { degree: j }, c))
}

pub fn l2_project_face(v: &dyn Fn(&Vec3) -> f64, face: &TriGeom, j: usize) -> Result<ProjectionCoeffs> {
    let basis = face_basis(face, j)?;
    let q = quad_tri(moment_quad_degree(j))?;
    let mut c = vec![0.0; basis.len()];
    let mut phi = vec![0.0; basis.len()];
    for (x, w) in q.mapped(&face.verts, face.area) {
        let fx = v(&x);
        basis.values(&x, &mut phi);
        for (ci, p) in c.iter_mut().zip(&phi) {
            *ci += w * fx * p;
        }
    }
    Ok(ProjectionCoeffs::new(ProjectionTarget::FaceScalar { degree: j }, c))
}

/// `L2` projection of the tangential part of `v` onto tangential `[P_j(F)]^2`,
/// expressed in the basis `{φ_i t1} ∪ {φ_i t2}` where `φ_i` is the prefix of
/// the face basis of degree `basis_degree >= j`.
fn l2_project_face_tangential(
    v: &dyn Fn(&Vec3) -> Vec3,
    face: &TriGeom,
    j: usize,
    basis_degree: usize,
) -> Result<ProjectionCoeffs> {
    let basis = face_basis(face, basis_degree)?;
    let m = poly_dim(2, j);
    let q = quad_tri(moment_quad_degree(basis_degree))?;
    let mut c = vec![0.0; 2 * m];
    let mut phi = vec![0.0; basis.len()];
    for (x, w) in q.mapped(&face.verts, face.area) {
        let fx = v(&x);
        let (a, b) = (fx.dot(&face.t1), fx.dot(&face.t2));
        basis.values(&x, &mut phi);
        for i in 0..m {
            c[i] += w * a * phi[i];
            c[m + i] += w * b * phi[i];
        }
    }
    Ok(ProjectionCoeffs::new(ProjectionTarget::FaceTangential { degree: j }, c))
}

fn solve_moments(mat: DMatrix<f64>, rhs: DVector<f64>, what: &str) -> Result<Vec<f64>> {
    let lu = DenseLu::new(mat).map_err(|_| Error::AssemblyFailure(format!("singular {what} moment system")))?;
    Ok(lu.solve(&rhs).iter().copied().collect())
}

/// Element H(div) projection result, evaluable pointwise.
#[derive(Debug, Clone)]
pub struct HDivField {
    pub space: MomentSpaceD,
    pub coeffs: ProjectionCoeffs,
}

impl HDivField {
    pub fn value(&self, x: &Vec3) -> Vec3 {
        self.space.values(x).iter().zip(&self.coeffs.coeffs).map(|(v, c)| *v * *c).sum()
    }

    pub fn divergence(&self, x: &Vec3) -> f64 {
        self.space.divergences(x).iter().zip(&self.coeffs.coeffs).map(|(v, c)| v * c).sum()
    }
}

/// Moments shared by the element H(div) projection: normal moments on faces
/// against `P_{j-1}(F)`, interior moments against `[P_{j-2}(T)]^3`.
fn hdiv_functionals(
    field: &dyn Fn(&Vec3) -> Vec<Vec3>,
    nfields: usize,
    tet: &TetGeom,
    j: usize,
) -> Result<DMatrix<f64>> {
    let qd = moment_quad_degree(j);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let tri = quad_tri(qd)?;
    let centroid = tet.centroid();
    for i in 0..4 {
        let verts = tet.face(i);
        let mut face = TriGeom::new(verts);
        if face.normal.dot(&(verts[0] - centroid)) < 0.0 {
            face = TriGeom::with_normal(verts, -face.normal);
        }
        let basis = face_basis(&face, j - 1)?;
        let mut block = vec![vec![0.0; nfields]; basis.len()];
        for (x, w) in tri.mapped(&face.verts, face.area) {
            let phi = basis.eval(&x);
            let vals = field(&x);
            for (a, pa) in phi.iter().enumerate() {
                for (b, vb) in vals.iter().enumerate() {
                    block[a][b] += w * pa * vb.dot(&face.normal);
                }
            }
        }
        rows.extend(block);
    }
    if j >= 2 {
        let basis = VectorBasis::cartesian(tet_basis(tet, j - 2)?);
        let mut block = vec![vec![0.0; nfields]; basis.len()];
        for (x, w) in quad_tet(qd)?.mapped(&tet.verts, tet.volume) {
            let tests = basis.values(&x);
            let vals = field(&x);
            for (a, ta) in tests.iter().enumerate() {
                for (b, vb) in vals.iter().enumerate() {
                    block[a][b] += w * ta.dot(vb);
                }
            }
        }
        rows.extend(block);
    }
    Ok(DMatrix::from_fn(rows.len(), nfields, |r, c| rows[r][c]))
}

pub fn hdiv_project(v: &dyn Fn(&Vec3) -> Vec3, tet: &TetGeom, j: usize) -> Result<HDivField> {
    if j == 0 {
        return Err(Error::InvalidParameter("H(div) projection needs j >= 1".into()));
    }
    let space = MomentSpaceD::on_tet(&tet.verts, j)?;
    let n = space.len();
    let mat = hdiv_functionals(&|x| space.values(x), n, tet, j)?;
    let rhs = hdiv_functionals(&|x| vec![v(x)], 1, tet, j)?;
    debug_assert_eq!(mat.nrows(), n);
    let coeffs = solve_moments(mat, rhs.column(0).into_owned(), "H(div)")?;
    Ok(HDivField { space, coeffs: ProjectionCoeffs::new(ProjectionTarget::HDiv { degree: j }, coeffs) })
}

/// Element H(curl) projection result, evaluable pointwise.
#[derive(Debug, Clone)]
pub struct HCurlField {
    pub basis: VectorBasis,
    pub coeffs: ProjectionCoeffs,
}

impl HCurlField {
    pub fn value(&self, x: &Vec3) -> Vec3 {
        self.basis.combine(&self.coeffs.coeffs, x)
    }

    pub fn curl(&self, x: &Vec3) -> Vec3 {
        self.basis.curls(x).iter().zip(&self.coeffs.coeffs).map(|(v, c)| *v * *c).sum()
    }
}

/// Tangential edge moments against `P_j(E)`, tangential face moments against
/// `D_{j-1}(F)` (`j >= 2`) and interior moments against `D_{j-2}(T)` (`j >= 3`).
fn hcurl_functionals(
    field: &dyn Fn(&Vec3) -> Vec<Vec3>,
    nfields: usize,
    tet: &TetGeom,
    j: usize,
) -> Result<DMatrix<f64>> {
    let qd = moment_quad_degree(j);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let seg = quad_seg(qd)?;
    for a in 0..4 {
        for b in (a + 1)..4 {
            let ends = [tet.verts[a], tet.verts[b]];
            let tau = (ends[1] - ends[0]).normalize();
            let len = (ends[1] - ends[0]).norm();
            let basis = ScalarBasis::on_seg(&ends, j)?;
            let mut block = vec![vec![0.0; nfields]; basis.len()];
            for (x, w) in seg.mapped(&ends, len) {
                let phi = basis.eval(&x);
                let vals = field(&x);
                for (r, pr) in phi.iter().enumerate() {
                    for (c, vc) in vals.iter().enumerate() {
                        block[r][c] += w * pr * vc.dot(&tau);
                    }
                }
            }
            rows.extend(block);
        }
    }
    if j >= 2 {
        let tri = quad_tri(qd)?;
        for i in 0..4 {
            let face = TriGeom::new(tet.face(i));
            let tests = MomentSpaceD::on_tri(&face.verts, &face.t1, &face.t2, j - 1)?;
            let mut block = vec![vec![0.0; nfields]; tests.len()];
            for (x, w) in tri.mapped(&face.verts, face.area) {
                let t = tests.values(&x);
                let vals = field(&x);
                for (r, tr) in t.iter().enumerate() {
                    for (c, vc) in vals.iter().enumerate() {
                        block[r][c] += w * tr.dot(vc);
                    }
                }
            }
            rows.extend(block);
        }
    }
    if j >= 3 {
        let tests = MomentSpaceD::on_tet(&tet.verts, j - 2)?;
        let mut block = vec![vec![0.0; nfields]; tests.len()];
        for (x, w) in quad_tet(qd)?.mapped(&tet.verts, tet.volume) {
            let t = tests.values(&x);
            let vals = field(&x);
            for (r, tr) in t.iter().enumerate() {
                for (c, vc) in vals.iter().enumerate() {
                    block[r][c] += w * tr.dot(vc);
                }
            }
        }
        rows.extend(block);
    }
    Ok(DMatrix::from_fn(rows.len(), nfields, |r, c| rows[r][c]))
}

pub fn hcurl_project(v: &dyn Fn(&Vec3) -> Vec3, tet: &TetGeom, j: usize) -> Result<HCurlField> {
    if j == 0 {
        return Err(Error::InvalidParameter("H(curl) projection needs j >= 1".into()));
    }
    let basis = VectorBasis::cartesian(tet_basis(tet, j)?);
    let n = basis.len();
    let mat = hcurl_functionals(&|x| basis.values(x), n, tet, j)?;
    let rhs = hcurl_functionals(&|x| vec![v(x)], 1, tet, j)?;
    debug_assert_eq!(mat.nrows(), n);
    let coeffs = solve_moments(mat, rhs.column(0).into_owned(), "H(curl)")?;
    Ok(HCurlField { basis, coeffs: ProjectionCoeffs::new(ProjectionTarget::HCurl { degree: j }, coeffs) })
}

/// `‖curl Π^curl v - Π^div curl v‖_{L2(T)}`.
pub fn commuting_check(
    v: &dyn Fn(&Vec3) -> Vec3,
    curl_v: &dyn Fn(&Vec3) -> Vec3,
    tet: &TetGeom,
    j: usize,
) -> Result<f64> {
    let pc = hcurl_project(v, tet, j)?;
    let pd = hdiv_project(curl_v, tet, j)?;
    let mut err = 0.0;
    for (x, w) in quad_tet(2 * j + 2)?.mapped(&tet.verts, tet.volume) {
        err += w * (pc.curl(&x) - pd.value(&x)).norm_squared();
    }
    Ok(err.sqrt())
}

/// Surface H(div) projection of the tangential field `g1` on one boundary
/// face, in tangential `[P_k(F)]^2`.
///
/// Matches normal-in-plane edge moments `∫_E (W·n_E) w` for `w ∈ P_k(E)` on
/// the three edges and, for `k >= 2`, the face moments `∫_F W·(n × ψ)` for
/// `ψ ∈ D_{k-1}(F)`. The normal part of `g1` is discarded first.
pub fn project_boundary_u(g1: &dyn Fn(&Vec3) -> Vec3, face: &TriGeom, k: usize) -> Result<ProjectionCoeffs> {
    if k == 0 {
        return Err(Error::InvalidParameter("boundary projection needs k >= 1".into()));
    }
    let basis = VectorBasis::tangential(face_basis(face, k)?, face.t1, face.t2);
    let n = basis.len();
    let normal = face.normal;
    let tangential = |x: &Vec3| {
        let g = g1(x);
        g - g.dot(&normal) * normal
    };
    let qd = moment_quad_degree(k);
    let seg = quad_seg(qd)?;
    let mut mat_rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for ends in face.edges() {
        let len = (ends[1] - ends[0]).norm();
        let n_e = (ends[1] - ends[0]).normalize().cross(&normal);
        let eb = ScalarBasis::on_seg(&ends, k)?;
        let mut block = vec![vec![0.0; n]; eb.len()];
        let mut r = vec![0.0; eb.len()];
        for (x, w) in seg.mapped(&ends, len) {
            let phi = eb.eval(&x);
            let vals = basis.values(&x);
            let gn = tangential(&x).dot(&n_e);
            for (a, pa) in phi.iter().enumerate() {
                for (b, vb) in vals.iter().enumerate() {
                    block[a][b] += w * pa * vb.dot(&n_e);
                }
                r[a] += w * pa * gn;
            }
        }
        mat_rows.extend(block);
        rhs.extend(r);
    }
    if k >= 2 {
        let tests = MomentSpaceD::on_tri(&face.verts, &face.t1, &face.t2, k - 1)?;
        let mut block = vec![vec![0.0; n]; tests.len()];
        let mut r = vec![0.0; tests.len()];
        for (x, w) in quad_tri(qd)?.mapped(&face.verts, face.area) {
            let t: Vec<Vec3> = tests.values(&x).iter().map(|p| normal.cross(p)).collect();
            let vals = basis.values(&x);
            let g = tangential(&x);
            for (a, ta) in t.iter().enumerate() {
                for (b, vb) in vals.iter().enumerate() {
                    block[a][b] += w * ta.dot(vb);
                }
                r[a] += w * ta.dot(&g);
            }
        }
        mat_rows.extend(block);
        rhs.extend(r);
    }
    debug_assert_eq!(mat_rows.len(), n);
    let mat = DMatrix::from_fn(n, n, |r, c| mat_rows[r][c]);
    let coeffs = solve_moments(mat, DVector::from_vec(rhs), "surface H(div)")?;
    Ok(ProjectionCoeffs::new(ProjectionTarget::FaceTangential { degree: k }, coeffs))
}

/// Facewise tangential `L2` projection of `g2` at degree `k - 1`, in the
/// prefix of the degree-`k` face basis.
pub fn project_boundary_c(g2: &dyn Fn(&Vec3) -> Vec3, face: &TriGeom, k: usize) -> Result<ProjectionCoeffs> {
    if k == 0 {
        return Err(Error::InvalidParameter("boundary projection needs k >= 1".into()));
    }
    l2_project_face_tangential(g2, face, k - 1, k)
}

/// Evaluates a face-tangential coefficient vector of the given degree,
/// using the prefix of the degree-`basis_degree` face basis.
pub fn eval_face_tangential(coeffs: &[f64], face: &TriGeom, basis_degree: usize, x: &Vec3) -> Result<Vec3> {
    let basis = face_basis(face, basis_degree)?;
    let m = coeffs.len() / 2;
    let phi = basis.eval(x);
    let a: f64 = (0..m).map(|i| coeffs[i] * phi[i]).sum();
    let b: f64 = (0..m).map(|i| coeffs[m + i] * phi[i]).sum();
    Ok(a * face.t1 + b * face.t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_tet() -> TetGeom {
        TetGeom::new([
            Vec3::new(0.1, 0.0, 0.05),
            Vec3::new(1.0, 0.2, 0.0),
            Vec3::new(0.0, 0.9, 0.2),
            Vec3::new(0.2, 0.1, 1.1),
        ])
    }

    fn l2_err_vec(tet: &TetGeom, a: impl Fn(&Vec3) -> Vec3, b: impl Fn(&Vec3) -> Vec3) -> f64 {
        let mut e = 0.0;
        for (x, w) in quad_tet(12).unwrap().mapped(&tet.verts, tet.volume) {
            e += w * (a(&x) - b(&x)).norm_squared();
        }
        e.sqrt()
    }

    #[test]
    fn l2_element_examples() {
        let tet = TetGeom::reference();
        let p1 = l2_project_element(&|x| x.x, &tet, 1).unwrap();
        let basis = ScalarBasis::on_tet(&tet.verts, tet.volume, 1).unwrap();
        for x in [Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.6, 0.1, 0.2)] {
            let val: f64 = basis.eval(&x).iter().zip(&p1.coeffs).map(|(a, b)| a * b).sum();
            assert!((val - x.x).abs() < 1e-13);
        }
        let p0 = l2_project_element(&|x| x.x, &tet, 0).unwrap();
        let b0 = ScalarBasis::on_tet(&tet.verts, tet.volume, 0).unwrap();
        let c = b0.eval(&Vec3::zeros())[0] * p0.coeffs[0];
        assert!((c - 0.25).abs() < 1e-14);
    }

    #[test]
    fn l2_rate_is_two_for_p1() {
        let err = |h: f64| {
            let tet = TetGeom::new([Vec3::zeros(), Vec3::x() * h, Vec3::y() * h, Vec3::z() * h]);
            let c = l2_project_element(&|x| x.x.exp(), &tet, 1).unwrap();
            let b = ScalarBasis::on_tet(&tet.verts, tet.volume, 1).unwrap();
            let mut e = 0.0;
            for (x, w) in quad_tet(12).unwrap().mapped(&tet.verts, tet.volume) {
                let v: f64 = b.eval(&x).iter().zip(&c.coeffs).map(|(a, b)| a * b).sum();
                e += w * (v - x.x.exp()).powi(2);
            }
            // normalize by sqrt(volume) so the per-element error reflects h^2
            (e / tet.volume).sqrt()
        };
        let rate = (err(0.2) / err(0.1)).log2();
        assert!((rate - 2.0).abs() < 0.1, "rate {rate}");
    }

    #[test]
    fn hdiv_examples() {
        let tet = sample_tet();
        let c = Vec3::new(1.0, -2.0, 0.5);
        let p = hdiv_project(&|_| c, &tet, 1).unwrap();
        assert_eq!(p.coeffs.coeffs.len(), 4);
        assert!(l2_err_vec(&tet, |x| p.value(x), |_| c) < 1e-12);
        // x_0 x lies in D_2 but not in [P_1]^3
        let f = |x: &Vec3| x.x * *x + Vec3::new(0.0, 1.0 - x.z, 0.0);
        let q = hdiv_project(&f, &tet, 2).unwrap();
        assert!(l2_err_vec(&tet, |x| q.value(x), f) < 1e-12);
        assert!(hdiv_project(&|_| c, &tet, 0).is_err());
    }

    #[test]
    fn hcurl_dimension_counts_and_idempotence() {
        let tet = sample_tet();
        for j in 1..=3 {
            let basis = VectorBasis::cartesian(ScalarBasis::on_tet(&tet.verts, tet.volume, j).unwrap());
            let coeffs: Vec<f64> = (0..basis.len()).map(|i| ((i * 37 % 11) as f64) / 7.0 - 0.6).collect();
            let f = |x: &Vec3| basis.combine(&coeffs, x);
            let p = hcurl_project(&f, &tet, j).unwrap();
            assert_eq!(p.coeffs.coeffs.len(), 3 * poly_dim(3, j));
            assert!(l2_err_vec(&tet, |x| p.value(x), f) < 1e-12, "j={j}");
        }
    }

    #[test]
    fn commuting_examples() {
        let tet = sample_tet();
        let r = commuting_check(&|x| Vec3::new(-x.y, x.x, 0.0), &|_| Vec3::new(0.0, 0.0, 2.0), &tet, 1).unwrap();
        assert!(r < 1e-12);
        let r = commuting_check(&|x| Vec3::new(x.y.sin(), 0.0, 0.0), &|x| Vec3::new(0.0, 0.0, -x.y.cos()), &tet, 1)
            .unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn boundary_u_reproduces_linear_traces() {
        let face = TriGeom::new([Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.2), Vec3::new(0.1, 1.0, 0.0)]);
        let n = face.normal;
        let u = |x: &Vec3| Vec3::new(1.0 + x.y, 2.0 * x.z - x.x, 0.5 * x.x + x.y);
        for k in 1..=3 {
            let g1 = |x: &Vec3| n.cross(&u(x));
            let p = project_boundary_u(&g1, &face, k).unwrap();
            assert_eq!(p.coeffs.len(), 2 * poly_dim(2, k));
            for x in [(face.verts[0] + face.verts[1] * 2.0 + face.verts[2]) / 4.0, face.verts[1]] {
                let w = eval_face_tangential(&p.coeffs, &face, k, &x).unwrap();
                assert!((w - g1(&x)).norm() < 1e-12, "k={k} {w:?} {:?}", g1(&x));
            }
        }
    }

    #[test]
    fn boundary_c_examples() {
        let face = TriGeom::new([Vec3::zeros(), Vec3::x(), Vec3::y()]);
        let z = project_boundary_c(&|_| Vec3::zeros(), &face, 2).unwrap();
        assert!(z.coeffs.iter().all(|c| *c == 0.0));
        let t = Vec3::new(0.3, -1.2, 0.0);
        let p = project_boundary_c(&|_| t, &face, 1).unwrap();
        let w = eval_face_tangential(&p.coeffs, &face, 1, &Vec3::new(0.2, 0.2, 0.0)).unwrap();
        assert!((w - t).norm() < 1e-13);
    }

    fn random_field(a: [f64; 9]) -> (impl Fn(&Vec3) -> Vec3, impl Fn(&Vec3) -> Vec3) {
        // v = (A0 sin(a3 y + a6 z), A1 cos(a4 z + a7 x), A2 sin(a5 x + a8 y))
        let v = move |x: &Vec3| {
            Vec3::new(
                a[0] * (a[3] * x.y + a[6] * x.z).sin(),
                a[1] * (a[4] * x.z + a[7] * x.x).cos(),
                a[2] * (a[5] * x.x + a[8] * x.y).sin(),
            )
        };
        let curl = move |x: &Vec3| {
            let s0 = a[3] * x.y + a[6] * x.z;
            let s1 = a[4] * x.z + a[7] * x.x;
            let s2 = a[5] * x.x + a[8] * x.y;
            // partial derivatives of each component
            let d0y = a[0] * a[3] * s0.cos();
            let d0z = a[0] * a[6] * s0.cos();
            let d1z = -a[1] * a[4] * s1.sin();
            let d1x = -a[1] * a[7] * s1.sin();
            let d2x = a[2] * a[5] * s2.cos();
            let d2y = a[2] * a[8] * s2.cos();
            Vec3::new(d2y - d1z, d0z - d2x, d1x - d0y)
        };
        (v, curl)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn commuting_diagram_on_random_fields(a in proptest::array::uniform9(-1.5f64..1.5), j in 1usize..=3) {
            let tet = sample_tet();
            let (v, curl) = random_field(a);
            let r = commuting_check(&v, &curl, &tet, j).unwrap();
            prop_assert!(r < 1e-10, "residual {r}");
        }

        #[test]
        fn projections_are_idempotent(c in proptest::collection::vec(-1.0f64..1.0, 30), j in 1usize..=2) {
            let tet = sample_tet();
            let basis = VectorBasis::cartesian(ScalarBasis::on_tet(&tet.verts, tet.volume, j).unwrap());
            let coeffs = &c[..basis.len()];
            let f = |x: &Vec3| basis.combine(coeffs, x);
            let once = hcurl_project(&f, &tet, j).unwrap();
            let twice = hcurl_project(&|x| once.value(x), &tet, j).unwrap();
            for (a, b) in once.coeffs.coeffs.iter().zip(&twice.coeffs.coeffs) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let l2 = l2_project_element_vector(&f, &tet, j).unwrap();
            for (a, b) in l2.coeffs.iter().zip(coeffs) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let d = hdiv_project(&f, &tet, j + 1).unwrap();
            let dd = hdiv_project(&|x| d.value(x), &tet, j + 1).unwrap();
            let scale = d.coeffs.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for (a, b) in d.coeffs.coeffs.iter().zip(&dd.coeffs.coeffs) {
                prop_assert!((a - b).abs() < 1e-10 * scale, "{a} {b}");
            }
        }
    }
}
