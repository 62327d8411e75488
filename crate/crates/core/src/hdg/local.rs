use nalgebra::{DMatrix, DVector, Matrix3};

use super::layout::Discretization;
use crate::error::Result;
use crate::geometry::Vec3;
use crate::mesh::Face;
use crate::polybasis::{quad_tet, quad_tri};

/// Volume and boundary data of a quad-curl problem.
pub trait ProblemData: Sync {
    /// Right-hand side of `curl curl r + grad p = f`.
    fn f(&self, x: &Vec3) -> Vec3;
    /// Right-hand side of `div u = g`.
    fn g(&self, x: &Vec3) -> f64;
    /// `n × u` on the boundary, for the unit normal `n`.
    fn g1(&self, x: &Vec3, n: &Vec3) -> Vec3;
    /// `n × curl u` on the boundary.
    fn g2(&self, x: &Vec3, n: &Vec3) -> Vec3;
}

/// Homogeneous data.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroData;

impl ProblemData for ZeroData {
    fn f(&self, _: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
    fn g(&self, _: &Vec3) -> f64 {
        0.0
    }
    fn g1(&self, _: &Vec3, _: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
    fn g2(&self, _: &Vec3, _: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
}

/// Local matrix and load of one tet over `[r|u|p ; face 0 | .. | face 3]`,
/// where face `i` is the tet's local face `i` (opposite vertex `i`).
#[derive(Debug, Clone)]
pub struct LocalSystem {
    pub tet: usize,
    pub matrix: DMatrix<f64>,
    pub load: DVector<f64>,
    pub n_interior: usize,
}

impl LocalSystem {
    /// Largest entry of `|A - A^T|` relative to `max |A|`.
    pub fn asymmetry(&self) -> f64 {
        let a = &self.matrix;
        let max = a.amax();
        if max == 0.0 {
            return 0.0;
        }
        (a - a.transpose()).amax() / max
    }
}

/// Face size entering the stabilization weights and the discrete norms:
/// the radius of the smallest circle containing the face.
pub fn face_size(face: &Face) -> f64 {
    0.5 * face.diameter
}

/// Quadrature degree of the bilinear forms (exact for polynomial integrands).
pub fn form_quad_degree(k: usize) -> usize {
    2 * k + 2
}

/// Quadrature degree for the loads `(f, v)` and `(g, q)`.
pub fn load_quad_degree(k: usize) -> usize {
    2 * k + 6
}

pub(crate) struct TetPoint {
    pub phi: Vec<f64>,
    pub grad: Vec<Vec3>,
    pub hess: Vec<Matrix3<f64>>,
}

impl TetPoint {
    pub fn new(disc: &Discretization, t: usize, x: &Vec3, hessians: bool) -> Self {
        let b = &disc.tet_bases[t];
        let n = b.len();
        let phi = b.eval(x);
        let mut grad = vec![Vec3::zeros(); n];
        b.gradients(x, &mut grad);
        let mut hess = Vec::new();
        if hessians {
            hess = vec![Matrix3::zeros(); n];
            b.hessians(x, &mut hess);
        }
        Self { phi, grad, hess }
    }
}

fn axis(c: usize) -> Vec3 {
    let mut e = Vec3::zeros();
    e[c] = 1.0;
    e
}

/// `A[i][j] += s * v_i · v_j` over the listed local indices.
fn add_gram(a: &mut DMatrix<f64>, idx: &[usize], vals: &[Vec3], s: f64) {
    for (p, &i) in idx.iter().enumerate() {
        for (q, &j) in idx.iter().enumerate() {
            a[(i, j)] += s * vals[p].dot(&vals[q]);
        }
    }
}

fn add_gram_scalar(a: &mut DMatrix<f64>, idx: &[usize], vals: &[f64], s: f64) {
    for (p, &i) in idx.iter().enumerate() {
        for (q, &j) in idx.iter().enumerate() {
            a[(i, j)] += s * vals[p] * vals[q];
        }
    }
}

/// `A[i][j] += s * x_i · y_j` and the transposed entry.
fn add_sym(a: &mut DMatrix<f64>, ix: &[usize], x: &[Vec3], iy: &[usize], y: &[Vec3], s: f64) {
    for (p, &i) in ix.iter().enumerate() {
        for (q, &j) in iy.iter().enumerate() {
            let v = s * x[p].dot(&y[q]);
            a[(i, j)] += v;
            a[(j, i)] += v;
        }
    }
}

fn add_sym_scalar(a: &mut DMatrix<f64>, ix: &[usize], x: &[f64], iy: &[usize], y: &[f64], s: f64) {
    for (p, &i) in ix.iter().enumerate() {
        for (q, &j) in iy.iter().enumerate() {
            let v = s * x[p] * y[q];
            a[(i, j)] += v;
            a[(j, i)] += v;
        }
    }
}

fn tangential(v: &Vec3, n: &Vec3) -> Vec3 {
    v - v.dot(n) * n
}

/// Assembles the symmetric local matrix and load vector of tet `t`.
///
/// With `n` the outward normal of `t` and `(n×a)·(n×b) = a_t·b_t`:
///
/// ```text
/// (r, s) - (u, curl curl s) - <n×û, curl s> - <n×ĉ, s>       (+ transpose)
/// + (div v, p) - <n·v, p̂>                                     (+ transpose)
/// - h_F^-3 <(u-û)_t, (v-v̂)_t> - h_F^-1 <(curl u-ĉ)_t, (curl v-d̂)_t>
/// + h_F^-1 <p-p̂, q-q̂>
/// = -(f, v) + (g, q)
/// ```
pub fn assemble_local(disc: &Discretization, t: usize, data: &dyn ProblemData) -> Result<LocalSystem> {
    let l = &disc.layout;
    let k = l.k;
    let (dk, dk1, mk, mk1) = (l.dk(), l.dk1(), l.mk(), l.mk1());
    let ni = l.interior_dofs();
    let nf = l.face_dofs();
    let n = l.local_dofs();
    let (r0, u0, p0) = (l.r_range().start, l.u_range().start, l.p_range().start);
    let (uh0, ch0, ph0) = (l.uhat_range().start, l.chat_range().start, l.phat_range().start);
    let mesh = &disc.mesh;
    let tet = &mesh.tets[t];
    let verts = mesh.tet_points(t);

    let mut a = DMatrix::zeros(n, n);
    let mut load = DVector::zeros(n);

    let r_idx: Vec<usize> = (r0..r0 + 3 * dk1).collect();
    let u_idx: Vec<usize> = (u0..u0 + 3 * dk).collect();
    let p_idx: Vec<usize> = (p0..p0 + dk).collect();

    let mut r_val = vec![Vec3::zeros(); 3 * dk1];
    let mut r_cc = vec![Vec3::zeros(); 3 * dk1];
    let mut u_val = vec![Vec3::zeros(); 3 * dk];
    let mut u_div = vec![0.0; 3 * dk];

    for (x, w) in quad_tet(form_quad_degree(k))?.mapped(&verts, tet.volume) {
        let tp = TetPoint::new(disc, t, &x, true);
        for c in 0..3 {
            let e = axis(c);
            for i in 0..dk1 {
                r_val[c * dk1 + i] = tp.phi[i] * e;
                r_cc[c * dk1 + i] = tp.hess[i] * e - tp.hess[i].trace() * e;
            }
            for i in 0..dk {
                u_val[c * dk + i] = tp.phi[i] * e;
                u_div[c * dk + i] = tp.grad[i][c];
            }
        }
        add_gram(&mut a, &r_idx, &r_val, w);
        add_sym(&mut a, &r_idx, &r_cc, &u_idx, &u_val, -w);
        add_sym_scalar(&mut a, &u_idx, &u_div, &p_idx, &tp.phi, w);
    }

    for (x, w) in quad_tet(load_quad_degree(k))?.mapped(&verts, tet.volume) {
        let phi = disc.tet_bases[t].eval(&x);
        let f = data.f(&x);
        let g = data.g(&x);
        for c in 0..3 {
            for i in 0..dk {
                load[u0 + c * dk + i] -= w * f[c] * phi[i];
            }
        }
        for i in 0..dk {
            load[p0 + i] += w * g * phi[i];
        }
    }

    let face_rule = quad_tri(form_quad_degree(k))?;
    let mut r_curl = vec![Vec3::zeros(); 3 * dk1];
    let mut u_curl = vec![Vec3::zeros(); 3 * dk];
    for lf in 0..4 {
        let f = tet.faces[lf];
        let face = &mesh.faces[f];
        let nrm = tet.outward_normal(mesh, lf);
        let (t1, t2) = (face.frame.t1, face.frame.t2);
        let hf = face_size(face);
        let base = ni + lf * nf;
        let uh_idx: Vec<usize> = (0..2 * mk).map(|i| base + uh0 + i).collect();
        let ch_idx: Vec<usize> = (0..2 * mk1).map(|i| base + ch0 + i).collect();
        let ph_idx: Vec<usize> = (0..mk).map(|i| base + ph0 + i).collect();
        // jump index sets: (u, û), (u, ĉ), (p, p̂)
        let j3_idx: Vec<usize> = u_idx.iter().chain(&uh_idx).copied().collect();
        let j1_idx: Vec<usize> = u_idx.iter().chain(&ch_idx).copied().collect();
        let j0_idx: Vec<usize> = p_idx.iter().chain(&ph_idx).copied().collect();
        let mut j3 = vec![Vec3::zeros(); j3_idx.len()];
        let mut j1 = vec![Vec3::zeros(); j1_idx.len()];
        let mut j0 = vec![0.0; j0_idx.len()];
        let mut uh_val = vec![Vec3::zeros(); 2 * mk];
        let mut ch_val = vec![Vec3::zeros(); 2 * mk1];
        let mut u_n = vec![0.0; 3 * dk];

        let pts = mesh.face_points(f);
        for (x, w) in face_rule.mapped(&pts, face.area) {
            let tp = TetPoint::new(disc, t, &x, false);
            let psi = disc.face_bases[f].eval(&x);
            for c in 0..3 {
                let e = axis(c);
                for i in 0..dk1 {
                    r_val[c * dk1 + i] = tp.phi[i] * e;
                    r_curl[c * dk1 + i] = tp.grad[i].cross(&e);
                }
                for i in 0..dk {
                    u_val[c * dk + i] = tp.phi[i] * e;
                    u_curl[c * dk + i] = tp.grad[i].cross(&e);
                    u_n[c * dk + i] = tp.phi[i] * nrm[c];
                }
            }
            for (c, d) in [t1, t2].iter().enumerate() {
                for i in 0..mk {
                    uh_val[c * mk + i] = psi[i] * d;
                }
                for i in 0..mk1 {
                    ch_val[c * mk1 + i] = psi[i] * d;
                }
            }
            let n_uh: Vec<Vec3> = uh_val.iter().map(|v| nrm.cross(v)).collect();
            let n_ch: Vec<Vec3> = ch_val.iter().map(|v| nrm.cross(v)).collect();
            add_sym(&mut a, &r_idx, &r_curl, &uh_idx, &n_uh, -w);
            add_sym(&mut a, &r_idx, &r_val, &ch_idx, &n_ch, -w);
            add_sym_scalar(&mut a, &u_idx, &u_n, &ph_idx, &psi[..mk], -w);

            for (i, v) in u_val.iter().enumerate() {
                j3[i] = tangential(v, &nrm);
            }
            for (i, v) in uh_val.iter().enumerate() {
                j3[3 * dk + i] = -v;
            }
            for (i, v) in u_curl.iter().enumerate() {
                j1[i] = tangential(v, &nrm);
            }
            for (i, v) in ch_val.iter().enumerate() {
                j1[3 * dk + i] = -v;
            }
            j0[..dk].copy_from_slice(&tp.phi);
            for i in 0..mk {
                j0[dk + i] = -psi[i];
            }
            add_gram(&mut a, &j3_idx, &j3, -w * hf.powi(-3));
            add_gram(&mut a, &j1_idx, &j1, -w / hf);
            add_gram_scalar(&mut a, &j0_idx, &j0, w / hf);
        }
    }

    Ok(LocalSystem { tet: t, matrix: a, load, n_interior: ni })
}
