//! Quadrature rules and polynomial bases on tetrahedra, triangles and
//! segments.

mod basis;
mod moment;
mod quadrature;

pub use basis::{
    homogeneous_exponents, monomial_exponents, poly_dim, Cell, LocalFrame, ScalarBasis, VectorBasis,
};
pub use moment::{moment_dim, MomentSpaceD};
pub use quadrature::{quad_seg, quad_tet, quad_tri, QuadRule, SegRule, TetRule, TriRule, MAX_QUAD_DEGREE};
