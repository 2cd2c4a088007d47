//! Reference solvers for the two singular limits: 2D incompressible
//! Navier-Stokes in vorticity form and the quasi-geostrophic equation, plus
//! the geostrophic velocity map.
//!
//! Both steppers use Strang splitting: exact per-mode linear decay for half a
//! step, classical RK4 for the advection over a full step, then the second
//! linear half step. Fields live on horizontal grids (`N_v = 1`, even).

mod nse2d;
mod qg;

pub use nse2d::{nse2d_rhs, nse2d_step, streamfunction, velocity_from_vorticity, NSE2DState};
pub use qg::{geostrophic_velocity, pi_from_pv, pv_from_pi, qg_rhs, qg_step, QGParams, QGState};

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{Grid, Parity, ScalarField};

/// Pseudo-spectral product `a * b` of two horizontal even fields, dealiased.
pub(crate) fn dealiased_products(g: &Grid, pairs: &[(&ScalarField, &ScalarField)]) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; g.n_phys()];
    for (a, b) in pairs {
        let (sa, sb) = g.inverse_pair((a.coeffs()?, Parity::Even), Some((b.coeffs()?, Parity::Even)));
        let sb = sb.expect("paired transform");
        for ((o, x), y) in acc.iter_mut().zip(&sa).zip(&sb) {
            *o += x * y;
        }
    }
    Ok(acc)
}

pub(crate) fn to_dealiased(g: &std::sync::Arc<Grid>, samples: &[f64]) -> ScalarField {
    let (mut c, _) = g.forward_pair((samples, Parity::Even), None);
    crate::spectral::ops::dealias_in_place(g, &mut c);
    ScalarField::from_coeffs(g, Parity::Even, c)
}

/// `exp(-rate(mode) h)` applied per mode.
pub(crate) fn decay(f: &ScalarField, h: f64, rate: impl Fn(f64) -> f64) -> Result<ScalarField> {
    f.map_modes(f.parity(), |m, c| c * (-rate(m.xi_h_sq()) * h).exp())
}

pub(crate) fn zero_mean(f: &mut ScalarField) -> Result<()> {
    f.coeffs_mut()?[0] = Complex64::new(0.0, 0.0);
    Ok(())
}
