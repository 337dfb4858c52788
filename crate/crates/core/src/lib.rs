//! Wiener amalgam norms on periodic grids, Lorentz rearrangement norms and
//! the free Schrödinger propagator, with numerical experiments built on them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amalgam;
pub mod analytic;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod grid;
pub mod lorentz;
pub mod numeric;
mod par;
pub mod schrodinger;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid, GridFunction};
pub use par::is_parallel;
