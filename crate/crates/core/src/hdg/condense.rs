use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::fields::SolutionFields;
use super::layout::Discretization;
use super::local::{assemble_local, ProblemData};
use crate::error::{Error, Result};
use crate::projection::{project_boundary_c, project_boundary_u};
use crate::solver::{CsrMatrix, DenseLu};

/// Elements processed per parallel batch during condensation.
const BATCH: usize = 512;

/// Per-tet recovery data: `x_i = z_load - z_face x_f`.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub z_face: DMatrix<f64>,
    pub z_load: DVector<f64>,
}

/// Schur complement system on the unconstrained face DOFs.
#[derive(Debug, Clone)]
pub struct CondensedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// All face DOFs; constrained entries hold the boundary values, free
    /// entries are zero.
    pub face_values: Vec<f64>,
    pub recovery: Vec<Recovery>,
}

/// Face DOF vector holding the boundary values on boundary faces:
/// `û = Π^{Γ,div}(g1) × n`, `ĉ = Π_{k-1}(g2) × n`, `p̂ = 0`.
pub fn boundary_values(disc: &Discretization, data: &dyn ProblemData) -> Result<Vec<f64>> {
    let l = &disc.layout;
    let nf = l.face_dofs();
    let (mk, mk1) = (l.mk(), l.mk1());
    let blocks = (0..l.n_faces)
        .into_par_iter()
        .filter(|&f| !l.is_free(f))
        .map(|f| {
            let geom = disc.mesh.face_geom(f);
            let n = geom.normal;
            let w = project_boundary_u(&|x| data.g1(x, &n), &geom, l.k)?;
            let c = project_boundary_c(&|x| data.g2(x, &n).cross(&n), &geom, l.k)?;
            let mut v = vec![0.0; nf];
            // (w1 t1 + w2 t2) × n = w2 t1 - w1 t2
            let uh = l.uhat_range().start;
            for i in 0..mk {
                v[uh + i] = w.coeffs[mk + i];
                v[uh + mk + i] = -w.coeffs[i];
            }
            let ch = l.chat_range().start;
            v[ch..ch + 2 * mk1].copy_from_slice(&c.coeffs);
            Ok((f, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![0.0; l.total_face_dofs()];
    for (f, v) in blocks {
        out[f * nf..(f + 1) * nf].copy_from_slice(&v);
    }
    Ok(out)
}

/// Sorted unconstrained faces sharing a tet with each unconstrained face.
fn face_neighbours(disc: &Discretization) -> Vec<Vec<usize>> {
    let l = &disc.layout;
    let mesh = &disc.mesh;
    let mut out = vec![Vec::new(); l.n_free_faces];
    for (f, face) in mesh.faces.iter().enumerate() {
        let Some(row) = l.free_index[f] else { continue };
        let mut nb: Vec<usize> = [Some(face.owner), face.neighbor]
            .iter()
            .flatten()
            .flat_map(|&t| mesh.tets[t].faces)
            .filter_map(|g| l.free_index[g])
            .collect();
        nb.sort_unstable();
        nb.dedup();
        out[row] = nb;
    }
    out
}

struct Condensed {
    tet: usize,
    schur: DMatrix<f64>,
    rhs: DVector<f64>,
    recovery: Recovery,
}

fn condense_element(disc: &Discretization, t: usize, data: &dyn ProblemData) -> Result<Condensed> {
    let ls = assemble_local(disc, t, data)?;
    let ni = ls.n_interior;
    let nfl = ls.matrix.nrows() - ni;
    let a = &ls.matrix;
    let kii = a.view((0, 0), (ni, ni)).into_owned();
    let lu = DenseLu::new(kii).map_err(|_| Error::CondensationFailure { element: t })?;
    let mut rhs = DMatrix::zeros(ni, nfl + 1);
    rhs.view_mut((0, 0), (ni, nfl)).copy_from(&a.view((0, ni), (ni, nfl)));
    rhs.view_mut((0, nfl), (ni, 1)).copy_from(&ls.load.rows(0, ni));
    let z = lu.solve_matrix(&rhs);
    let z_face = z.view((0, 0), (ni, nfl)).into_owned();
    let z_load = z.column(nfl).into_owned();
    let kfi = a.view((ni, 0), (nfl, ni));
    let schur = a.view((ni, ni), (nfl, nfl)) - &kfi * &z_face;
    let rhs = ls.load.rows(ni, nfl) - kfi * &z_load;
    Ok(Condensed { tet: t, schur, rhs, recovery: Recovery { z_face, z_load } })
}

/// Eliminates the interior unknowns of every tet and the constrained
/// boundary face unknowns, leaving a system in the interior-face DOFs.
///
/// Elements are condensed in parallel batches; the global matrix is
/// accumulated in element order, so the result does not depend on the
/// thread schedule.
pub fn condense(disc: &Discretization, data: &dyn ProblemData) -> Result<CondensedSystem> {
    let l = &disc.layout;
    let nf = l.face_dofs();
    let face_values = boundary_values(disc, data)?;
    let nbrs = face_neighbours(disc);

    let n = l.free_face_dofs();
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    for nb in &nbrs {
        for _ in 0..nf {
            for &g in nb {
                col_idx.extend(g * nf..(g + 1) * nf);
            }
            row_ptr.push(col_idx.len());
        }
    }
    let mut values = vec![0.0; col_idx.len()];
    let mut rhs = vec![0.0; n];
    let mut recovery = Vec::with_capacity(l.n_tets);

    for start in (0..l.n_tets).step_by(BATCH) {
        let end = (start + BATCH).min(l.n_tets);
        let batch = (start..end)
            .into_par_iter()
            .map(|t| condense_element(disc, t, data))
            .collect::<Result<Vec<_>>>()?;
        for c in batch {
            let faces = disc.mesh.tets[c.tet].faces;
            for (a, &fa) in faces.iter().enumerate() {
                let Some(ra) = l.free_index[fa] else { continue };
                for (b, &fb) in faces.iter().enumerate() {
                    match l.free_index[fb] {
                        Some(rb) => {
                            let pos = nbrs[ra].binary_search(&rb).expect("pattern covers element faces");
                            for i in 0..nf {
                                let row = ra * nf + i;
                                let off = row_ptr[row] + pos * nf;
                                for j in 0..nf {
                                    values[off + j] += c.schur[(a * nf + i, b * nf + j)];
                                }
                            }
                        }
                        None => {
                            let xb = &face_values[fb * nf..(fb + 1) * nf];
                            for i in 0..nf {
                                let s: f64 = (0..nf).map(|j| c.schur[(a * nf + i, b * nf + j)] * xb[j]).sum();
                                rhs[ra * nf + i] -= s;
                            }
                        }
                    }
                }
                for i in 0..nf {
                    rhs[ra * nf + i] += c.rhs[a * nf + i];
                }
            }
            recovery.push(c.recovery);
        }
    }
    let matrix = CsrMatrix { nrows: n, ncols: n, row_ptr, col_idx, values };
    Ok(CondensedSystem { matrix, rhs, face_values, recovery })
}

impl CondensedSystem {
    /// All face DOFs: boundary values plus the given free solution.
    pub fn expand(&self, disc: &Discretization, free: &[f64]) -> Result<Vec<f64>> {
        let l = &disc.layout;
        if free.len() != l.free_face_dofs() {
            return Err(Error::DimensionMismatch { expected: l.free_face_dofs(), got: free.len() });
        }
        let nf = l.face_dofs();
        let mut all = self.face_values.clone();
        for f in 0..l.n_faces {
            if let Some(r) = l.free_index[f] {
                all[f * nf..(f + 1) * nf].copy_from_slice(&free[r * nf..(r + 1) * nf]);
            }
        }
        Ok(all)
    }
}

/// Back-substitutes the interior unknowns from the free face solution.
pub fn recover_interior(disc: &Discretization, sys: &CondensedSystem, free: &[f64]) -> Result<SolutionFields> {
    let l = &disc.layout;
    let nf = l.face_dofs();
    let faces = sys.expand(disc, free)?;
    let interior: Vec<f64> = (0..l.n_tets)
        .into_par_iter()
        .flat_map_iter(|t| {
            let rec = &sys.recovery[t];
            let mut xf = DVector::zeros(4 * nf);
            for (a, &f) in disc.mesh.tets[t].faces.iter().enumerate() {
                xf.rows_mut(a * nf, nf).copy_from_slice(&faces[f * nf..(f + 1) * nf]);
            }
            let xi = &rec.z_load - &rec.z_face * xf;
            xi.iter().copied().collect::<Vec<_>>()
        })
        .collect();
    SolutionFields::from_parts(disc, interior, faces)
}
