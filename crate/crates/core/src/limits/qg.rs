use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::nse2d::rk4;
use crate::limits::{dealiased_products, decay, to_dealiased, zero_mean};
use crate::spectral::ops::{self, Axis};
use crate::spectral::{Grid, Parity, ScalarField, VectorField};

/// Viscosity and the sign `s` of the transport term in
/// `dq/dt + s (d2 pi, -d1 pi) . grad(Laplacian_h pi) = nu Laplacian_h^2 pi`.
/// `s = -1` advects `q` with the geostrophic velocity `(-d2 pi, d1 pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGParams {
    pub nu: f64,
    pub jacobian_sign: f64,
}

impl Default for QGParams {
    fn default() -> Self {
        Self {
            nu: 1.0,
            jacobian_sign: -1.0,
        }
    }
}

/// Geostrophic pressure / streamfunction `pi` at time `t`.
#[derive(Clone, Debug)]
pub struct QGState {
    pub pi: ScalarField,
    pub t: f64,
}

impl QGState {
    pub fn new(pi: ScalarField, t: f64) -> Result<Self> {
        if !pi.grid().is_horizontal() || pi.parity() != Parity::Even {
            return Err(Error::InvalidParameter("pi must be an even horizontal field".into()));
        }
        let mut pi = pi.to_spectral();
        zero_mean(&mut pi)?;
        Ok(Self { pi, t })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.pi.grid()
    }
}

/// `q = Laplacian_h pi - pi`.
pub fn pv_from_pi(pi: &ScalarField) -> Result<ScalarField> {
    pi.map_modes(Parity::Even, |m, c| -(1.0 + m.xi_h_sq()) * c)
}

/// `pi = q / (-|xi|^2 - 1)` per mode.
pub fn pi_from_pv(q: &ScalarField) -> Result<ScalarField> {
    q.map_modes(Parity::Even, |m, c| -c / (1.0 + m.xi_h_sq()))
}

/// `u = (-d2 pi, d1 pi, 0)`, the solution of `g x u + grad pi = 0`.
pub fn geostrophic_velocity(pi: &ScalarField) -> Result<VectorField> {
    Ok(VectorField::new([
        ops::diff(pi, Axis::X2)?.scaled(-1.0),
        ops::diff(pi, Axis::X1)?,
        ScalarField::zeros(pi.grid(), pi.parity().flip()),
    ]))
}

/// Transport term `-s (d2 pi, -d1 pi) . grad(Laplacian_h pi)` as a function of `q`.
pub fn qg_rhs(q: &ScalarField, jacobian_sign: f64) -> Result<ScalarField> {
    let g = q.grid().clone();
    let pi = pi_from_pv(q)?;
    let lap = ops::laplacian_h(&pi)?;
    let p1 = ops::diff(&pi, Axis::X1)?;
    let p2 = ops::diff(&pi, Axis::X2)?;
    let l1 = ops::diff(&lap, Axis::X1)?;
    let l2 = ops::diff(&lap, Axis::X2)?;
    let a = dealiased_products(&g, &[(&p2, &l1)])?;
    let b = dealiased_products(&g, &[(&p1, &l2)])?;
    let t: Vec<f64> = a.iter().zip(&b).map(|(x, y)| -jacobian_sign * (x - y)).collect();
    let mut out = to_dealiased(&g, &t);
    zero_mean(&mut out)?;
    Ok(out)
}

/// Linear decay rate of `q` at `|xi|^2 = x`: `nu x^2 / (1 + x)`.
fn qg_rate(nu: f64) -> impl Fn(f64) -> f64 {
    move |x| nu * x * x / (1.0 + x)
}

/// One Strang step of the quasi-geostrophic equation.
pub fn qg_step(state: &QGState, dt: f64, params: &QGParams) -> Result<QGState> {
    let q = pv_from_pi(&state.pi)?;
    let rate = qg_rate(params.nu);
    let a = decay(&q, 0.5 * dt, &rate)?;
    let b = rk4(&a, dt, |x| qg_rhs(x, params.jacobian_sign))?;
    let c = decay(&b, 0.5 * dt, &rate)?;
    if !c.is_finite() {
        return Err(Error::NonFinite {
            step: 0,
            t: state.t + dt,
        });
    }
    Ok(QGState {
        pi: pi_from_pv(&c)?,
        t: state.t + dt,
    })
}
