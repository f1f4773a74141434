//! Geometric multigrid for the periodic staggered Stokes system.

mod coarse;
mod cycle;
mod transfer;

pub use coarse::{DenseCoarseSolver, SpectralSolver};
pub use cycle::{measure_rho, measure_rho_until, CycleKind, CycleSpec, Measurement, Multigrid, DIVERGENCE_FACTOR, MEASURE_RTOL};
pub use transfer::{prolong, prolong_add, restrict, TransferStencil};
