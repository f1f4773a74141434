use thiserror::Error;

/// Errors raised by the solver, smoothers and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} is invalid: cells per side must be a power of two and at least 4")]
    InvalidGrid(usize),

    #[error("field has {found} cells per side but the grid has {expected}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("grid with {0} cells per side cannot be coarsened further")]
    CannotCoarsen(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency ({0}, {1}) is outside the domain of the symbol")]
    SingularFrequency(f64, f64),

    #[error("Schur complement solve stopped after {iterations} iterations with relative residual {residual:e}")]
    InnerSolveDiverged { iterations: usize, residual: f64 },

    #[error("right-hand side has a component of relative size {0:e} outside the range of the operator")]
    InconsistentRhs(f64),

    #[error("coarsest-grid factorization failed: {0}")]
    CoarseSolve(String),

    #[error("initial defect is zero; the convergence factor is undefined")]
    DegenerateMeasurement,

    #[error("iteration diverged at cycle {cycle}: relative defect {ratio:e} ({context})")]
    Diverged { cycle: usize, ratio: f64, context: String },

    #[error("empty parameter search box: {0}")]
    EmptySearch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
