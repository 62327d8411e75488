use super::layout::Discretization;
use super::local::TetPoint;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::projection::{l2_project_element, l2_project_element_vector};
use crate::polybasis::quad_tri;

/// Coefficients of `(r_h, u_h, p_h)` per tet and `(û_h, ĉ_h, p̂_h)` per face.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFields {
    pub k: usize,
    pub interior: Vec<f64>,
    pub faces: Vec<f64>,
    n_interior: usize,
    n_face: usize,
}

impl SolutionFields {
    pub fn zeros(disc: &Discretization) -> Self {
        let l = &disc.layout;
        Self {
            k: l.k,
            interior: vec![0.0; l.n_tets * l.interior_dofs()],
            faces: vec![0.0; l.total_face_dofs()],
            n_interior: l.interior_dofs(),
            n_face: l.face_dofs(),
        }
    }

    pub fn from_parts(disc: &Discretization, interior: Vec<f64>, faces: Vec<f64>) -> Result<Self> {
        let mut s = Self::zeros(disc);
        if interior.len() != s.interior.len() {
            return Err(Error::DimensionMismatch { expected: s.interior.len(), got: interior.len() });
        }
        if faces.len() != s.faces.len() {
            return Err(Error::DimensionMismatch { expected: s.faces.len(), got: faces.len() });
        }
        s.interior = interior;
        s.faces = faces;
        Ok(s)
    }

    pub fn tet(&self, t: usize) -> &[f64] {
        &self.interior[t * self.n_interior..(t + 1) * self.n_interior]
    }

    pub fn tet_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.interior[t * self.n_interior..(t + 1) * self.n_interior]
    }

    pub fn face(&self, f: usize) -> &[f64] {
        &self.faces[f * self.n_face..(f + 1) * self.n_face]
    }

    pub fn face_mut(&mut self, f: usize) -> &mut [f64] {
        &mut self.faces[f * self.n_face..(f + 1) * self.n_face]
    }

    /// Componentwise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        let mut d = self.clone();
        d.interior.iter_mut().zip(&other.interior).for_each(|(a, b)| *a -= b);
        d.faces.iter_mut().zip(&other.faces).for_each(|(a, b)| *a -= b);
        d
    }

    /// Local vector `[interior | face 0 | .. | face 3]` of tet `t`.
    pub fn local_vector(&self, disc: &Discretization, t: usize) -> Vec<f64> {
        let mut v = self.tet(t).to_vec();
        for &f in &disc.mesh.tets[t].faces {
            v.extend_from_slice(self.face(f));
        }
        v
    }
}

/// Pointwise values of the element fields of one tet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues {
    pub r: Vec3,
    pub u: Vec3,
    pub curl_u: Vec3,
    pub div_u: f64,
    pub p: f64,
    pub grad_p: Vec3,
}

impl Discretization {
    /// Evaluates the element fields of tet `t` at `x`.
    pub fn eval_tet(&self, fields: &SolutionFields, t: usize, x: &Vec3) -> PointValues {
        let l = &self.layout;
        let (dk, dk1) = (l.dk(), l.dk1());
        let c = fields.tet(t);
        let tp = TetPoint::new(self, t, x, false);
        let mut v = PointValues {
            r: Vec3::zeros(),
            u: Vec3::zeros(),
            curl_u: Vec3::zeros(),
            div_u: 0.0,
            p: 0.0,
            grad_p: Vec3::zeros(),
        };
        let (r0, u0, p0) = (l.r_range().start, l.u_range().start, l.p_range().start);
        for comp in 0..3 {
            let mut e = Vec3::zeros();
            e[comp] = 1.0;
            for i in 0..dk1 {
                v.r[comp] += c[r0 + comp * dk1 + i] * tp.phi[i];
            }
            for i in 0..dk {
                let a = c[u0 + comp * dk + i];
                v.u[comp] += a * tp.phi[i];
                v.curl_u += a * tp.grad[i].cross(&e);
                v.div_u += a * tp.grad[i][comp];
            }
        }
        for i in 0..dk {
            v.p += c[p0 + i] * tp.phi[i];
            v.grad_p += c[p0 + i] * tp.grad[i];
        }
        v
    }

    /// `(û, ĉ, p̂)` of face `f` at `x`.
    pub fn eval_face(&self, fields: &SolutionFields, f: usize, x: &Vec3) -> (Vec3, Vec3, f64) {
        let l = &self.layout;
        let (mk, mk1) = (l.mk(), l.mk1());
        let c = fields.face(f);
        let psi = self.face_bases[f].eval(x);
        let frame = &self.mesh.faces[f].frame;
        let mut uh = Vec3::zeros();
        let mut ch = Vec3::zeros();
        let mut ph = 0.0;
        let (uh0, ch0, ph0) = (l.uhat_range().start, l.chat_range().start, l.phat_range().start);
        for (d, t) in [frame.t1, frame.t2].iter().enumerate() {
            for i in 0..mk {
                uh += c[uh0 + d * mk + i] * psi[i] * t;
            }
            for i in 0..mk1 {
                ch += c[ch0 + d * mk1 + i] * psi[i] * t;
            }
        }
        for i in 0..mk {
            ph += c[ph0 + i] * psi[i];
        }
        (uh, ch, ph)
    }
}

/// A smooth field triple `(r, u, p)` with `curl u`, used to sample exact
/// solutions into the discrete spaces.
pub struct ExactFields<'a> {
    pub r: &'a (dyn Fn(&Vec3) -> Vec3 + Sync),
    pub u: &'a (dyn Fn(&Vec3) -> Vec3 + Sync),
    pub curl_u: &'a (dyn Fn(&Vec3) -> Vec3 + Sync),
    pub p: &'a (dyn Fn(&Vec3) -> f64 + Sync),
}

/// `L2` projections of an exact solution: elementwise for `(r, u, p)`,
/// facewise tangential traces for `(û, ĉ)` and the trace for `p̂`.
pub fn sample_exact(disc: &Discretization, exact: &ExactFields) -> Result<SolutionFields> {
    let l = &disc.layout;
    let (dk1, mk, mk1) = (l.dk1(), l.mk(), l.mk1());
    let mut out = SolutionFields::zeros(disc);
    for t in 0..l.n_tets {
        let tet = disc.mesh.tet_geom(t);
        let u = l2_project_element_vector(exact.u, &tet, l.k)?;
        let rk = l2_project_element_vector(exact.r, &tet, l.k)?;
        let p = l2_project_element(exact.p, &tet, l.k)?;
        let dk = l.dk();
        let c = out.tet_mut(t);
        // prefix of an orthonormal basis: truncating the degree-k moments gives the degree-(k-1) projection
        for comp in 0..3 {
            for i in 0..dk1 {
                c[l.r_range().start + comp * dk1 + i] = rk.coeffs[comp * dk + i];
            }
        }
        c[l.u_range()].copy_from_slice(&u.coeffs);
        c[l.p_range()].copy_from_slice(&p.coeffs);
    }
    let q = quad_tri((2 * l.k + 2).max(16))?;
    for f in 0..l.n_faces {
        let face = &disc.mesh.faces[f];
        let pts = disc.mesh.face_points(f);
        let basis = &disc.face_bases[f];
        let (t1, t2) = (face.frame.t1, face.frame.t2);
        let mut c = vec![0.0; l.face_dofs()];
        let (uh0, ch0, ph0) = (l.uhat_range().start, l.chat_range().start, l.phat_range().start);
        for (x, w) in q.mapped(&pts, face.area) {
            let psi = basis.eval(&x);
            let u = (exact.u)(&x);
            let cu = (exact.curl_u)(&x);
            let p = (exact.p)(&x);
            for (d, t) in [t1, t2].iter().enumerate() {
                for i in 0..mk {
                    c[uh0 + d * mk + i] += w * u.dot(t) * psi[i];
                }
                for i in 0..mk1 {
                    c[ch0 + d * mk1 + i] += w * cu.dot(t) * psi[i];
                }
            }
            for i in 0..mk {
                c[ph0 + i] += w * p * psi[i];
            }
        }
        out.face_mut(f).copy_from_slice(&c);
    }
    Ok(out)
}
