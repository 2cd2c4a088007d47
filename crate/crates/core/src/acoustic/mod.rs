//! The acoustic propagator `W(p, u) = (div u, g x u + grad p)`: closed-form
//! spectrum, kernel projector, truncation to `H_M`, half-wave evolution and
//! time-averaged localization functionals.

mod decay;
mod operator;

pub use decay::{
    half_wave, local_decay_functional, local_decay_integral, localized_norm_sq, rage_functional, rage_of_states,
    recurrence_time, trapezoid, Cutoff,
};
pub use operator::{
    apply_W, complement_project, eigenvalues, in_band, kernel_project, kernel_vector, truncate, w_matrix,
    write_mode_table, AcousticBasis, ModeBlock,
};
