//! Manufactured solutions, error measurement and convergence studies.

mod cases;
mod errors;
mod pipeline;
mod table;

pub use cases::{case_lshape, case_smooth, Domain, ExactFieldsOwned, ManufacturedCase};
pub use errors::{compute_errors, error_quad_degree, ErrorVector};
pub use pipeline::{solve_case, SolveOptions, SolveOutcome};
pub use table::{rate, run_study, to_markdown, write_csv, StudyRow};
