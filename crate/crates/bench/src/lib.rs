//! Fixtures shared by the benchmarks.

use quadcurl_core::study::Domain;
use quadcurl_core::{case_smooth, condense, CondensedSystem, Discretization, Result};

/// Discretization of the unit cube at level `n`.
pub fn cube(n: usize, k: usize) -> Result<Discretization> {
    Discretization::new(Domain::Cube.mesh(n)?, k)
}

/// Condensed system of the smooth manufactured case.
pub fn smooth_system(disc: &Discretization) -> Result<CondensedSystem> {
    condense(disc, &case_smooth())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let d = cube(1, 1).unwrap();
        let s = smooth_system(&d).unwrap();
        assert_eq!(s.matrix.nrows, d.layout.free_face_dofs());
    }
}
