//! Hybridizable discontinuous Galerkin solver for the three-dimensional
//! mixed quad-curl problem
//!
//! ```text
//!   r - curl curl u = 0,  curl curl r + grad p = f,  div u = g   in Ω
//!   n × u = g1,  n × curl u = g2,  p = 0                         on Γ
//! ```
//!
//! Interior unknowns `(r_h, u_h, p_h)` are eliminated element by element and
//! the global system is posed on the face unknowns `(û_h, ĉ_h, p̂_h)` only.
//!
//! Module map:
//! - [`mesh`]: structured Kuhn tetrahedral meshes of the unit cube and the
//!   L-shaped domain, with face frames and geometric data.
//! - [`polybasis`]: quadrature and orthonormal polynomial bases.
//! - [`projection`]: L2, H(div), H(curl) and surface projections.
//! - [`hdg`]: local assembly, static condensation, recovery and the
//!   discrete energy norms.
//! - [`solver`]: CSR storage, restarted GMRES with sparse LBL^T, block ILU(0)
//!   or block-Jacobi preconditioning, and dense LU.
//! - [`study`]: manufactured solutions, error measurement and convergence
//!   tables.
//! - [`vtk`]: legacy VTK output of meshes and solutions.

pub mod error;
pub mod geometry;
pub mod hdg;
pub mod mesh;
pub mod polybasis;
pub mod projection;
pub mod solver;
pub mod study;
pub mod vtk;

pub use error::{Error, Result};
pub use geometry::Vec3;
pub use hdg::{
    condense, infsup_estimate, recover_interior, sigma_norm, CondensedSystem, Discretization,
    DofLayout, LocalSystem, SigmaNorm, SolutionFields,
};
pub use mesh::{generate_box_mesh, generate_lshape_mesh, mesh_report, Mesh, MeshReport};
pub use solver::{dense_solve, gmres, CsrMatrix, GmresOptions, PreconditionerKind, SolveReport};
pub use study::{
    case_lshape, case_smooth, compute_errors, run_study, solve_case, ErrorVector,
    ManufacturedCase, SolveOptions, StudyRow,
};
