//! Linear solvers for the condensed face system.

mod dense;
mod direct;
mod gmres;
mod ilu;
mod sparse;

pub use dense::{dense_solve, DenseLu, DENSE_SIZE_LIMIT};
pub use gmres::{gmres, BlockJacobi, GmresOptions, IdentityPreconditioner, Preconditioner, SolveReport};
pub use direct::SparseLblt;
pub use ilu::BlockIlu0;
pub use sparse::CsrMatrix;

use crate::error::Result;

/// Preconditioner choice for the condensed face system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreconditionerKind {
    BlockJacobi,
    BlockIlu0,
    #[default]
    SparseLblt,
}

impl PreconditionerKind {
    /// Builds the preconditioner with one block per face.
    pub fn build(self, a: &CsrMatrix, block: usize) -> Result<Box<dyn Preconditioner>> {
        Ok(match self {
            Self::BlockJacobi => Box::new(BlockJacobi::new(a, block)?),
            Self::BlockIlu0 => Box::new(BlockIlu0::new(a, block)?),
            Self::SparseLblt => Box::new(SparseLblt::new(a)?),
        })
    }
}
