use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported degree {requested} (maximum {max})")]
    UnsupportedDegree { requested: usize, max: usize },

    #[error("assembly failure: {0}")]
    AssemblyFailure(String),

    #[error("condensation failure: interior block of element {element} is singular")]
    CondensationFailure { element: usize },

    #[error("solver failure: no convergence after {} iterations (relative residual {:.3e})", .report.iterations, .report.relative_residual)]
    SolverFailure { report: SolveReport },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("dense problem of size {size} exceeds the limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("pipeline failed at level n={level}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag for the error category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::UnsupportedDegree { .. } => "unsupported-degree",
            Error::AssemblyFailure(_) => "assembly-failure",
            Error::CondensationFailure { .. } => "condensation-failure",
            Error::SolverFailure { .. } => "solver-failure",
            Error::SingularMatrix => "singular-matrix",
            Error::SizeLimit { .. } => "size-limit",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Level { source, .. } => source.kind(),
            Error::Io(_) | Error::Csv(_) => "io",
        }
    }
}
