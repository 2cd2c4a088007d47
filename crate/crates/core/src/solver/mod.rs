//! Time integration of the rotating weakly compressible system with exact
//! per-mode treatment of the stiff linear part.

mod integrate;
mod linear;
mod nonlinear;
mod state;

pub use integrate::{
    check_energy, energy_report, run, run_metadata, run_observed, step, Diagnostics, EnergyReport, StepOptions,
    StepOutcome, Stepper, Trajectory,
};
pub use linear::{linear_phase, mode_eigenvalues, mode_matrix, skew_eigen, Propagator};
pub use nonlinear::{nonlinear_rhs, nonlinear_rhs_with_max};
pub use state::{ACParams, ACState};
