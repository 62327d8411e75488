use std::ops::Range;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::polybasis::{poly_dim, ScalarBasis};

/// Highest polynomial degree the discretization accepts.
pub const MAX_DEGREE: usize = 5;

/// Unknown counts and offsets.
///
/// Interior unknowns of one tet are ordered `[r | u | p]`, face unknowns of
/// one face `[û | ĉ | p̂]`. Vector unknowns are ordered component-major:
/// entry `c * d + a` is scalar basis function `a` times direction `c`.
/// Global face DOF `f * face_dofs() + l` belongs to face `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofLayout {
    pub k: usize,
    pub n_tets: usize,
    pub n_faces: usize,
    /// Position of each face among the unconstrained (interior) faces.
    pub free_index: Vec<Option<usize>>,
    pub n_free_faces: usize,
}

impl DofLayout {
    pub fn new(mesh: &Mesh, k: usize) -> Result<Self> {
        check_degree(k)?;
        let mut next = 0;
        let free_index = mesh
            .faces
            .iter()
            .map(|f| {
                if f.is_boundary() {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        Ok(Self { k, n_tets: mesh.tets.len(), n_faces: mesh.faces.len(), free_index, n_free_faces: next })
    }

    /// `dim P_k(T)`.
    pub fn dk(&self) -> usize {
        poly_dim(3, self.k)
    }

    /// `dim P_{k-1}(T)`.
    pub fn dk1(&self) -> usize {
        poly_dim(3, self.k - 1)
    }

    /// `dim P_k(F)`.
    pub fn mk(&self) -> usize {
        poly_dim(2, self.k)
    }

    /// `dim P_{k-1}(F)`.
    pub fn mk1(&self) -> usize {
        poly_dim(2, self.k - 1)
    }

    pub fn r_range(&self) -> Range<usize> {
        0..3 * self.dk1()
    }

    pub fn u_range(&self) -> Range<usize> {
        let s = 3 * self.dk1();
        s..s + 3 * self.dk()
    }

    pub fn p_range(&self) -> Range<usize> {
        let s = 3 * self.dk1() + 3 * self.dk();
        s..s + self.dk()
    }

    pub fn interior_dofs(&self) -> usize {
        3 * self.dk1() + 4 * self.dk()
    }

    pub fn uhat_range(&self) -> Range<usize> {
        0..2 * self.mk()
    }

    pub fn chat_range(&self) -> Range<usize> {
        let s = 2 * self.mk();
        s..s + 2 * self.mk1()
    }

    pub fn phat_range(&self) -> Range<usize> {
        let s = 2 * self.mk() + 2 * self.mk1();
        s..s + self.mk()
    }

    pub fn face_dofs(&self) -> usize {
        3 * self.mk() + 2 * self.mk1()
    }

    /// All face DOFs, constrained or not.
    pub fn total_face_dofs(&self) -> usize {
        self.n_faces * self.face_dofs()
    }

    pub fn free_face_dofs(&self) -> usize {
        self.n_free_faces * self.face_dofs()
    }

    /// Size of the local matrix of one tet (interior plus four faces).
    pub fn local_dofs(&self) -> usize {
        self.interior_dofs() + 4 * self.face_dofs()
    }

    pub fn is_free(&self, face: usize) -> bool {
        self.free_index[face].is_some()
    }
}

fn check_degree(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("polynomial degree k must be at least 1".into()));
    }
    if k > MAX_DEGREE {
        return Err(Error::UnsupportedDegree { requested: k, max: MAX_DEGREE });
    }
    Ok(())
}

/// A mesh together with its degree-`k` layout and orthonormal bases.
///
/// Each tet and face carries one orthonormal basis of degree `k`; the
/// degree-`k-1` spaces use its leading functions.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub layout: DofLayout,
    pub tet_bases: Vec<ScalarBasis>,
    pub face_bases: Vec<ScalarBasis>,
}

impl Discretization {
    pub fn new(mesh: Mesh, k: usize) -> Result<Self> {
        use rayon::prelude::*;
        let layout = DofLayout::new(&mesh, k)?;
        let tet_bases = (0..mesh.tets.len())
            .into_par_iter()
            .map(|t| ScalarBasis::on_tet(&mesh.tet_points(t), mesh.tets[t].volume, k))
            .collect::<Result<Vec<_>>>()?;
        let face_bases = (0..mesh.faces.len())
            .into_par_iter()
            .map(|f| {
                let g = mesh.face_geom(f);
                ScalarBasis::on_tri(&g.verts, g.area, &g.t1, &g.t2, k)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh, layout, tet_bases, face_bases })
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_box_mesh, generate_lshape_mesh, BoxBounds};

    #[test]
    fn per_element_and_per_face_counts() {
        let m = generate_box_mesh(1, BoxBounds::unit_cube()).unwrap();
        let l1 = DofLayout::new(&m, 1).unwrap();
        assert_eq!(l1.interior_dofs(), 3 + 12 + 4);
        assert_eq!(l1.face_dofs(), 11);
        let l2 = DofLayout::new(&m, 2).unwrap();
        assert_eq!(l2.interior_dofs(), 12 + 30 + 10);
        assert_eq!(l2.face_dofs(), 24);
        assert_eq!(l2.p_range().end, l2.interior_dofs());
        assert_eq!(l2.phat_range().end, l2.face_dofs());
        assert!(DofLayout::new(&m, 0).is_err());
        assert!(matches!(DofLayout::new(&m, MAX_DEGREE + 1), Err(Error::UnsupportedDegree { .. })));
    }

    #[test]
    fn face_dof_totals() {
        let cube = [(2, 1, 1320), (4, 1, 9504), (8, 1, 71808), (2, 2, 2880), (4, 2, 20736)];
        for (n, k, dofs) in cube {
            let m = generate_box_mesh(n, BoxBounds::unit_cube()).unwrap();
            let l = DofLayout::new(&m, k).unwrap();
            assert_eq!(l.total_face_dofs(), dofs, "cube n={n} k={k}");
            assert_eq!(l.n_free_faces + m.boundary_face_count(), m.faces.len());
        }
        for (n, dofs) in [(2, 1034), (4, 7304)] {
            let m = generate_lshape_mesh(n).unwrap();
            assert_eq!(DofLayout::new(&m, 1).unwrap().total_face_dofs(), dofs, "lshape n={n}");
        }
    }
}
