//! Desk-scale numerical laboratory for nonlocal geometric variational problems:
//! fractional perimeters, Massari-type prescribed-curvature functionals, rescaled
//! fractional Allen-Cahn energies with forcing and mass constraints, and the
//! asymptotic regimes connecting them (s -> 1/2 and eps -> 0 sweeps, Lagrange
//! multiplier tracking, nonlocal Neumann external conditions, hybrid mean
//! curvature diagnostics).
//!
//! Everything is 1D/2D on uniform cell-centered grids. Kernel integrals use
//! closed forms in 1D and precomputed cell-pair moment tables in 2D; fields are
//! extended beyond the computational box by declared far-field constants with
//! analytic tail corrections.

pub mod domain;
pub mod energy;
pub mod error;
pub mod kernels;
pub mod lab;
pub mod operator;
pub mod optimize;
pub(crate) mod util;
pub mod variation;

pub use error::{Error, Result};
