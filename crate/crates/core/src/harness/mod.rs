//! Initial data, the four eps-sweep studies and result emission.
//!
//! Every study runs the full system once per eps on a shared time grid,
//! samples a space-time quantity on the observation box `K`, and reports one
//! row per eps together with log-log fits and monotonicity verdicts.

mod config;
mod emit;
mod initial;
mod studies;

pub use config::{ChiKind, DtPolicy, IcKind, RecurrencePolicy, Study, StudyConfig};
pub use emit::{csv, emit, gnuplot, meta, FILES};
pub use initial::{gen_initial_data, study_grid};
pub use studies::{
    loglog_fit, run_study, study_acoustic_decay, study_convergence_beta_ge1, study_convergence_beta_half,
    study_rage_decay, trapezoid_times, Column, Fit, Provenance, Row, RowStatus, StudyResult, Verdict,
};
