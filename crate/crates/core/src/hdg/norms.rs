use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::fields::SolutionFields;
use super::full::{assemble_full, full_size, local_to_global};
use super::layout::Discretization;
use super::local::{face_size, form_quad_degree, TetPoint, ZeroData};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::polybasis::{quad_tet, quad_tri};
use crate::solver::DENSE_SIZE_LIMIT;

/// Components `(‖r‖, ‖(u,û,ĉ)‖_U, ‖(p,p̂)‖_P)` of the discrete energy norm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SigmaNorm {
    pub r: f64,
    pub u: f64,
    pub p: f64,
}

impl SigmaNorm {
    pub fn total(&self) -> f64 {
        (self.r * self.r + self.u * self.u + self.p * self.p).sqrt()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Component {
    R,
    U,
    P,
}

/// Component of each local DOF of a tet.
fn local_components(disc: &Discretization) -> Vec<Component> {
    let l = &disc.layout;
    let mut c = vec![Component::R; l.local_dofs()];
    c[l.u_range()].fill(Component::U);
    c[l.p_range()].fill(Component::P);
    for a in 0..4 {
        let base = l.interior_dofs() + a * l.face_dofs();
        let s = |r: std::ops::Range<usize>| (base + r.start)..(base + r.end);
        c[s(l.uhat_range())].fill(Component::U);
        c[s(l.chat_range())].fill(Component::U);
        c[s(l.phat_range())].fill(Component::P);
    }
    c
}

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

fn tangential(v: &Vec3, n: &Vec3) -> Vec3 {
    v - v.dot(n) * n
}

/// Element part of the squared norm as a matrix over the local DOFs:
///
/// ```text
/// ‖r‖² + ‖curl curl u‖² + h_T²‖div u‖² + h_T²‖grad p‖²
///   + Σ_F h_F^-3‖(u-û)_t‖² + h_F^-1‖(curl u-ĉ)_t‖² + h_F^-1‖p-p̂‖²
/// ```
///
/// The normal jumps `h_F‖[[n·u]]‖²` couple neighbouring tets and are
/// handled by [`jump_matrix`].
pub fn local_norm_matrix(disc: &Discretization, t: usize) -> Result<DMatrix<f64>> {
    let l = &disc.layout;
    let k = l.k;
    let (dk, dk1, mk, mk1) = (l.dk(), l.dk1(), l.mk(), l.mk1());
    let (ni, nf) = (l.interior_dofs(), l.face_dofs());
    let mesh = &disc.mesh;
    let tet = &mesh.tets[t];
    let ht2 = tet.diameter * tet.diameter;
    let mut a = DMatrix::zeros(l.local_dofs(), l.local_dofs());
    let r_idx: Vec<usize> = l.r_range().collect();
    let u_idx: Vec<usize> = l.u_range().collect();
    let p_idx: Vec<usize> = l.p_range().collect();
    let mut r_val = vec![Vec3::zeros(); 3 * dk1];
    let mut u_cc = vec![Vec3::zeros(); 3 * dk];
    let mut u_div = vec![0.0; 3 * dk];
    let mut u_val = vec![Vec3::zeros(); 3 * dk];
    let mut u_curl = vec![Vec3::zeros(); 3 * dk];

    for (x, w) in quad_tet(form_quad_degree(k))?.mapped(&mesh.tet_points(t), tet.volume) {
        let tp = TetPoint::new(disc, t, &x, true);
        for c in 0..3 {
            let mut e = Vec3::zeros();
            e[c] = 1.0;
            for i in 0..dk1 {
                r_val[c * dk1 + i] = tp.phi[i] * e;
            }
            for i in 0..dk {
                u_cc[c * dk + i] = tp.hess[i] * e - tp.hess[i].trace() * e;
                u_div[c * dk + i] = tp.grad[i][c];
            }
        }
        add_gram(&mut a, &r_idx, &r_val, w);
        add_gram(&mut a, &u_idx, &u_cc, w);
        add_gram_scalar(&mut a, &u_idx, &u_div, w * ht2);
        add_gram(&mut a, &p_idx, &tp.grad, w * ht2);
    }

    let rule = quad_tri(form_quad_degree(k))?;
    for lf in 0..4 {
        let f = tet.faces[lf];
        let face = &mesh.faces[f];
        let nrm = tet.outward_normal(mesh, lf);
        let hf = face_size(face);
        let base = ni + lf * nf;
        let uh: Vec<usize> = l.uhat_range().map(|i| base + i).collect();
        let ch: Vec<usize> = l.chat_range().map(|i| base + i).collect();
        let ph: Vec<usize> = l.phat_range().map(|i| base + i).collect();
        let j3_idx: Vec<usize> = u_idx.iter().chain(&uh).copied().collect();
        let j1_idx: Vec<usize> = u_idx.iter().chain(&ch).copied().collect();
        let j0_idx: Vec<usize> = p_idx.iter().chain(&ph).copied().collect();
        let mut j3 = vec![Vec3::zeros(); j3_idx.len()];
        let mut j1 = vec![Vec3::zeros(); j1_idx.len()];
        let mut j0 = vec![0.0; j0_idx.len()];
        for (x, w) in rule.mapped(&mesh.face_points(f), face.area) {
            let tp = TetPoint::new(disc, t, &x, false);
            let psi = disc.face_bases[f].eval(&x);
            for c in 0..3 {
                let mut e = Vec3::zeros();
                e[c] = 1.0;
                for i in 0..dk {
                    u_val[c * dk + i] = tp.phi[i] * e;
                    u_curl[c * dk + i] = tp.grad[i].cross(&e);
                }
            }
            for i in 0..3 * dk {
                j3[i] = tangential(&u_val[i], &nrm);
                j1[i] = tangential(&u_curl[i], &nrm);
            }
            for (d, tv) in [face.frame.t1, face.frame.t2].iter().enumerate() {
                for i in 0..mk {
                    j3[3 * dk + d * mk + i] = -psi[i] * tv;
                }
                for i in 0..mk1 {
                    j1[3 * dk + d * mk1 + i] = -psi[i] * tv;
                }
            }
            j0[..dk].copy_from_slice(&tp.phi);
            for i in 0..mk {
                j0[dk + i] = -psi[i];
            }
            add_gram(&mut a, &j3_idx, &j3, w * hf.powi(-3));
            add_gram(&mut a, &j1_idx, &j1, w / hf);
            add_gram_scalar(&mut a, &j0_idx, &j0, w / hf);
        }
    }
    Ok(a)
}

/// `h_F‖[[n·u]]‖²_F` on interior face `f` as a matrix over
/// `[u of owner | u of neighbour]`.
pub fn jump_matrix(disc: &Discretization, f: usize) -> Result<DMatrix<f64>> {
    let l = &disc.layout;
    let dk = l.dk();
    let face = &disc.mesh.faces[f];
    let nb = face.neighbor.ok_or_else(|| Error::InvalidParameter(format!("face {f} is a boundary face")))?;
    let mut a = DMatrix::zeros(6 * dk, 6 * dk);
    let idx: Vec<usize> = (0..6 * dk).collect();
    let mut j = vec![0.0; 6 * dk];
    for (x, w) in quad_tri(form_quad_degree(l.k))?.mapped(&disc.mesh.face_points(f), face.area) {
        for (side, (t, sign)) in [(face.owner, 1.0), (nb, -1.0)].into_iter().enumerate() {
            let phi = disc.tet_bases[t].eval(&x);
            for c in 0..3 {
                for i in 0..dk {
                    j[side * 3 * dk + c * dk + i] = sign * face.normal[c] * phi[i];
                }
            }
        }
        add_gram_scalar(&mut a, &idx, &j, w * face_size(face));
    }
    Ok(a)
}

fn quad_form(a: &DMatrix<f64>, x: &[f64], mask: impl Fn(usize) -> bool) -> f64 {
    let mut s = 0.0;
    for i in (0..x.len()).filter(|&i| mask(i)) {
        for j in (0..x.len()).filter(|&j| mask(j)) {
            s += x[i] * a[(i, j)] * x[j];
        }
    }
    s
}

/// Discrete energy norm components of `fields` (typically a difference).
pub fn sigma_norm(disc: &Discretization, fields: &SolutionFields) -> Result<SigmaNorm> {
    let comps = local_components(disc);
    let per_tet = (0..disc.layout.n_tets)
        .into_par_iter()
        .map(|t| {
            let a = local_norm_matrix(disc, t)?;
            let x = fields.local_vector(disc, t);
            Ok([Component::R, Component::U, Component::P].map(|c| quad_form(&a, &x, |i| comps[i] == c)))
        })
        .collect::<Result<Vec<_>>>()?;
    let u0 = disc.layout.u_range().start;
    let dk = disc.layout.dk();
    let jumps = (0..disc.layout.n_faces)
        .into_par_iter()
        .filter(|&f| !disc.mesh.faces[f].is_boundary())
        .map(|f| {
            let a = jump_matrix(disc, f)?;
            let face = &disc.mesh.faces[f];
            let mut x = fields.tet(face.owner)[u0..u0 + 3 * dk].to_vec();
            x.extend_from_slice(&fields.tet(face.neighbor.unwrap())[u0..u0 + 3 * dk]);
            Ok(quad_form(&a, &x, |_| true))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sq = [0.0; 3];
    for v in per_tet {
        for c in 0..3 {
            sq[c] += v[c];
        }
    }
    sq[1] += jumps.iter().sum::<f64>();
    Ok(SigmaNorm { r: sq[0].max(0.0).sqrt(), u: sq[1].max(0.0).sqrt(), p: sq[2].max(0.0).sqrt() })
}

/// The squared norm as a dense matrix over the DOFs of
/// [`crate::hdg::assemble_full`] (constrained face DOFs set to zero).
pub fn norm_matrix(disc: &Discretization) -> Result<DMatrix<f64>> {
    let n = full_size(disc);
    if n > DENSE_SIZE_LIMIT {
        return Err(Error::SizeLimit { size: n, limit: DENSE_SIZE_LIMIT });
    }
    let l = &disc.layout;
    let mut a = DMatrix::zeros(n, n);
    for t in 0..l.n_tets {
        let loc = local_norm_matrix(disc, t)?;
        let map = local_to_global(disc, t);
        for (i, gi) in map.iter().enumerate() {
            let Some(gi) = gi else { continue };
            for (j, gj) in map.iter().enumerate() {
                if let Some(gj) = gj {
                    a[(*gi, *gj)] += loc[(i, j)];
                }
            }
        }
    }
    let (ni, dk, u0) = (l.interior_dofs(), l.dk(), l.u_range().start);
    for (f, face) in disc.mesh.faces.iter().enumerate() {
        let Some(nb) = face.neighbor else { continue };
        let jm = jump_matrix(disc, f)?;
        let g = |i: usize| {
            let t = if i < 3 * dk { face.owner } else { nb };
            t * ni + u0 + i % (3 * dk)
        };
        for i in 0..6 * dk {
            for j in 0..6 * dk {
                a[(g(i), g(j))] += jm[(i, j)];
            }
        }
    }
    Ok(a)
}

/// Smallest `|λ|` of `L^-1 B L^-T` for symmetric `B` and SPD `N = L L^T`,
/// together with the largest.
pub fn generalized_min_singular(b: &DMatrix<f64>, n: &DMatrix<f64>) -> Result<(f64, f64)> {
    let chol = n.clone().cholesky().ok_or(Error::SingularMatrix)?;
    let l = chol.l();
    let x = l.solve_lower_triangular(b).ok_or(Error::SingularMatrix)?;
    let c = l.solve_lower_triangular(&x.transpose()).ok_or(Error::SingularMatrix)?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigenvalues();
    let min = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((min, max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfSup {
    /// Smallest generalized singular value of the compound form.
    pub beta: f64,
    /// Largest one (a continuity constant estimate).
    pub max: f64,
    pub size: usize,
}

/// Dense spectral estimate of the inf-sup constant of the compound form
/// with respect to the discrete energy norm, on homogeneous spaces.
pub fn infsup_estimate(disc: &Discretization) -> Result<InfSup> {
    let n = full_size(disc);
    if n > DENSE_SIZE_LIMIT {
        return Err(Error::SizeLimit { size: n, limit: DENSE_SIZE_LIMIT });
    }
    let (b, _) = assemble_full(disc, &ZeroData)?;
    let nm = norm_matrix(disc)?;
    let (beta, max) = generalized_min_singular(&b, &nm)?;
    Ok(InfSup { beta, max, size: n })
}

/// `x^T N x` for a full-system vector; used to cross-check [`sigma_norm`].
pub fn norm_matrix_form(nm: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(nm * x))
}
