//! HDG discretization: DOF layout, local assembly, static condensation,
//! interior recovery and the discrete energy norms.

mod condense;
mod fields;
mod full;
mod layout;
mod local;
mod norms;

pub use condense::{boundary_values, condense, recover_interior, CondensedSystem, Recovery};
pub use fields::{sample_exact, ExactFields, PointValues, SolutionFields};
pub use full::{assemble_full, solve_full_dense};
pub use layout::{Discretization, DofLayout, MAX_DEGREE};
pub use local::{assemble_local, face_size, form_quad_degree, load_quad_degree, LocalSystem, ProblemData, ZeroData};
pub use norms::{
    generalized_min_singular, infsup_estimate, jump_matrix, local_norm_matrix, norm_matrix, norm_matrix_form,
    sigma_norm, InfSup, SigmaNorm,
};
