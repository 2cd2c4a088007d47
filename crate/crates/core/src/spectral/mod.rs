//! Discrete function spaces on the slab: grid, fields, transforms,
//! differential operators, projectors and the snapshot format.

mod field;
mod grid;
pub mod ops;
mod region;
pub mod snapshot;

pub use field::{Parity, ScalarField, Values, VectorField, VELOCITY_PARITY};
pub use grid::{Grid, Mode};
pub use ops::{Axis, HelmholtzParts};
pub use region::{weighted_norm_sq, SubBox};
