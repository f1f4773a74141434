//! Matrix-free geometric multigrid for the 2D Stokes equations on a
//! periodic MAC grid, with mass-based smoothers and local Fourier analysis.

pub mod error;
pub mod grid;
pub mod lfa;
pub mod multigrid;
pub mod relaxation;
pub mod stencil;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Component, GridSpec, StaggeredField};
pub use multigrid::{measure_rho, CycleKind, CycleSpec, Measurement, Multigrid, TransferStencil};
pub use relaxation::{RelaxParams, RelaxScheme, Smoother};
