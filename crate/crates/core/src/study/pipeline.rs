use std::time::Instant;

use super::cases::ManufacturedCase;
use super::errors::{compute_errors, ErrorVector};
use crate::error::Result;
use crate::hdg::{condense, recover_interior, Discretization, SolutionFields};
use crate::solver::{gmres, GmresOptions, PreconditionerKind, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub k: usize,
    pub gmres: GmresOptions,
    pub precond: PreconditionerKind,
    /// Extra exactness added to the error quadrature.
    pub quad_boost: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { k: 1, gmres: GmresOptions::default(), precond: PreconditionerKind::default(), quad_boost: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub disc: Discretization,
    pub fields: SolutionFields,
    pub errors: ErrorVector,
    pub report: SolveReport,
    /// All face DOFs, constrained or not.
    pub dof: usize,
    pub free_dof: usize,
    pub seconds: f64,
}

/// Mesh, assemble, condense, solve, recover and measure one level.
pub fn solve_case(case: &ManufacturedCase, n: usize, opts: &SolveOptions) -> Result<SolveOutcome> {
    let start = Instant::now();
    let mesh = case.domain().mesh(n)?;
    let disc = Discretization::new(mesh, opts.k)?;
    let sys = condense(&disc, case)?;
    let pc = opts.precond.build(&sys.matrix, disc.layout.face_dofs())?;
    let (x, report) = gmres(&sys.matrix, &sys.rhs, &opts.gmres, pc.as_ref())?;
    let fields = recover_interior(&disc, &sys, &x)?;
    drop(sys);
    let errors = compute_errors(&disc, &fields, case, opts.quad_boost)?;
    let dof = disc.layout.total_face_dofs();
    let free_dof = disc.layout.free_face_dofs();
    Ok(SolveOutcome { disc, fields, errors, report, dof, free_dof, seconds: start.elapsed().as_secs_f64() })
}
