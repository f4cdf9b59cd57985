//! High-order Lax–Wendroff flux reconstruction for special relativistic hydrodynamics.
//!
//! Modules, bottom up:
//! - [`eos`]: equations of state and conservative/primitive recovery.
//! - [`flux`]: physical flux, wave speeds, Rusanov flux, admissibility.
//! - [`basis`]: Gauss–Legendre nodes, differentiation, correction functions.
//! - [`lwfr`]: time-averaged fluxes, argument scaling, face fluxes, high-order update.
//! - [`blending`]: smoothness indicator, subcell update, flux and solution blending.
//! - [`harness`]: problems, boundaries, the stepping driver, norms, output, CLI.

pub mod basis;
pub mod blending;
pub mod error;
pub mod eos;
pub mod flux;
pub mod harness;
pub mod lwfr;
pub mod solver;
pub mod state;

pub use error::{Error, RecoveryMethod, Result};
pub use eos::EosModel;
pub use state::{Conserved, Direction, FluxVector, Primitive};
