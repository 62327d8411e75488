//! Uncondensed global assembly over interior and unconstrained face DOFs.
//! Only meant for small meshes: it backs the condensation oracle and the
//! inf-sup diagnostic.

use nalgebra::{DMatrix, DVector};

use super::condense::boundary_values;
use super::fields::SolutionFields;
use super::layout::Discretization;
use super::local::{assemble_local, ProblemData};
use crate::error::{Error, Result};
use crate::solver::{dense_solve, DENSE_SIZE_LIMIT};

/// Global index of each local DOF of tet `t`, `None` for constrained ones.
pub(crate) fn local_to_global(disc: &Discretization, t: usize) -> Vec<Option<usize>> {
    let l = &disc.layout;
    let (ni, nf) = (l.interior_dofs(), l.face_dofs());
    let base = l.n_tets * ni;
    let mut map: Vec<Option<usize>> = (0..ni).map(|i| Some(t * ni + i)).collect();
    for &f in &disc.mesh.tets[t].faces {
        match l.free_index[f] {
            Some(r) => map.extend((0..nf).map(|j| Some(base + r * nf + j))),
            None => map.extend(std::iter::repeat_n(None, nf)),
        }
    }
    map
}

pub(crate) fn full_size(disc: &Discretization) -> usize {
    let l = &disc.layout;
    l.n_tets * l.interior_dofs() + l.free_face_dofs()
}

fn check_size(n: usize) -> Result<()> {
    if n > DENSE_SIZE_LIMIT {
        Err(Error::SizeLimit { size: n, limit: DENSE_SIZE_LIMIT })
    } else {
        Ok(())
    }
}

/// The global matrix with boundary values eliminated, and its load.
pub fn assemble_full(disc: &Discretization, data: &dyn ProblemData) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = full_size(disc);
    check_size(n)?;
    let l = &disc.layout;
    let nf = l.face_dofs();
    let bc = boundary_values(disc, data)?;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for t in 0..l.n_tets {
        let ls = assemble_local(disc, t, data)?;
        let map = local_to_global(disc, t);
        let mut known = vec![0.0; map.len()];
        for (a_loc, &f) in disc.mesh.tets[t].faces.iter().enumerate() {
            if !l.is_free(f) {
                let off = ls.n_interior + a_loc * nf;
                known[off..off + nf].copy_from_slice(&bc[f * nf..(f + 1) * nf]);
            }
        }
        for (i, gi) in map.iter().enumerate() {
            let Some(gi) = *gi else { continue };
            b[gi] += ls.load[i];
            for (j, gj) in map.iter().enumerate() {
                match gj {
                    Some(gj) => a[(gi, *gj)] += ls.matrix[(i, j)],
                    None => b[gi] -= ls.matrix[(i, j)] * known[j],
                }
            }
        }
    }
    Ok((a, b))
}

/// Splits a full solution vector into interior and face coefficients.
pub(crate) fn fields_from_full(disc: &Discretization, x: &DVector<f64>, bc: Vec<f64>) -> Result<SolutionFields> {
    let l = &disc.layout;
    let nint = l.n_tets * l.interior_dofs();
    let nf = l.face_dofs();
    let mut faces = bc;
    for f in 0..l.n_faces {
        if let Some(r) = l.free_index[f] {
            for j in 0..nf {
                faces[f * nf + j] = x[nint + r * nf + j];
            }
        }
    }
    SolutionFields::from_parts(disc, x.rows(0, nint).iter().copied().collect(), faces)
}

/// Solves the uncondensed system with dense LU.
pub fn solve_full_dense(disc: &Discretization, data: &dyn ProblemData) -> Result<SolutionFields> {
    let (a, b) = assemble_full(disc, data)?;
    let x = dense_solve(&a, &b)?;
    fields_from_full(disc, &x, boundary_values(disc, data)?)
}
