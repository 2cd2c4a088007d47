//! Numerical toolkit for the rotating weakly compressible slab.
//!
//! `spectral` holds the grid, fields and operators; `solver` integrates the
//! full system; `acoustic` analyses the fast propagator; `limits` holds the
//! reference solvers for the two singular limits; `harness` runs eps-sweeps.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod error;
pub mod harness;
pub mod limits;
pub mod par;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
