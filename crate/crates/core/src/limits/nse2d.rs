use std::sync::Arc;

use crate::error::{Error, Result};
use crate::limits::{dealiased_products, decay, to_dealiased, zero_mean};
use crate::spectral::ops::{self, Axis};
use crate::spectral::{Grid, Parity, ScalarField, VectorField};

/// Vorticity `omega = d1 u2 - d2 u1` of a horizontal flow at time `t`.
#[derive(Clone, Debug)]
pub struct NSE2DState {
    pub omega: ScalarField,
    pub t: f64,
}

impl NSE2DState {
    pub fn new(omega: ScalarField, t: f64) -> Result<Self> {
        if !omega.grid().is_horizontal() || omega.parity() != Parity::Even {
            return Err(Error::InvalidParameter(
                "vorticity must be an even horizontal field".into(),
            ));
        }
        let mut omega = omega.to_spectral();
        zero_mean(&mut omega)?;
        Ok(Self { omega, t })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.omega.grid()
    }

    /// `|u|^2 / 2` integrated.
    pub fn energy(&self) -> f64 {
        0.5 * velocity_from_vorticity(&self.omega).expect("spectral").norm_sq()
    }

    /// `|omega|^2 / 2` integrated.
    pub fn enstrophy(&self) -> f64 {
        0.5 * self.omega.norm_sq()
    }
}

/// `psi` with `Laplacian_h psi = omega`, zero mean.
pub fn streamfunction(omega: &ScalarField) -> Result<ScalarField> {
    ops::inverse_laplacian(omega)
}

/// `u = (-d2 psi, d1 psi, 0)`.
pub fn velocity_from_vorticity(omega: &ScalarField) -> Result<VectorField> {
    let psi = streamfunction(omega)?;
    Ok(VectorField::new([
        ops::diff(&psi, Axis::X2)?.scaled(-1.0),
        ops::diff(&psi, Axis::X1)?,
        ScalarField::zeros(omega.grid(), Parity::Odd),
    ]))
}

/// Advection term `-u . grad omega`, dealiased.
pub fn nse2d_rhs(omega: &ScalarField) -> Result<ScalarField> {
    let g = omega.grid().clone();
    let u = velocity_from_vorticity(omega)?;
    let w1 = ops::diff(omega, Axis::X1)?;
    let w2 = ops::diff(omega, Axis::X2)?;
    let prod = dealiased_products(&g, &[(&u.comps[0], &w1), (&u.comps[1], &w2)])?;
    let neg: Vec<f64> = prod.iter().map(|x| -x).collect();
    let mut out = to_dealiased(&g, &neg);
    zero_mean(&mut out)?;
    Ok(out)
}

pub(crate) fn rk4(f: &ScalarField, h: f64, rhs: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<ScalarField> {
    let k1 = rhs(f)?;
    let k2 = rhs(&f.lin_comb(1.0, &k1, 0.5 * h)?)?;
    let k3 = rhs(&f.lin_comb(1.0, &k2, 0.5 * h)?)?;
    let k4 = rhs(&f.lin_comb(1.0, &k3, h)?)?;
    let incr = k1.add(&k4)?.lin_comb(1.0, &k2.add(&k3)?, 2.0)?;
    f.lin_comb(1.0, &incr, h / 6.0)
}

/// One Strang step of `d omega/dt + u . grad omega = nu Laplacian_h omega`.
pub fn nse2d_step(state: &NSE2DState, dt: f64, nu: f64) -> Result<NSE2DState> {
    let visc = |x: f64| nu * x;
    let a = decay(&state.omega, 0.5 * dt, visc)?;
    let b = rk4(&a, dt, nse2d_rhs)?;
    let c = decay(&b, 0.5 * dt, visc)?;
    if !c.is_finite() {
        return Err(Error::NonFinite {
            step: 0,
            t: state.t + dt,
        });
    }
    Ok(NSE2DState {
        omega: c,
        t: state.t + dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_slab_fields() {
        let g = Grid::new(2.0 * PI, 8, 4, 2.0 / 3.0).unwrap();
        assert!(NSE2DState::new(ScalarField::zeros(&g, Parity::Even), 0.0).is_err());
    }

    #[test]
    fn taylor_green_has_no_advection() {
        let g = Grid::horizontal(2.0 * PI, 16, 2.0 / 3.0).unwrap();
        let w = ScalarField::from_fn(&g, Parity::Even, |x, y, _| x.cos() * y.cos()).to_spectral();
        assert!(nse2d_rhs(&w).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn vorticity_of_recovered_velocity() {
        let g = Grid::horizontal(2.0 * PI, 16, 2.0 / 3.0).unwrap();
        let w = ScalarField::from_fn(&g, Parity::Even, |x, y, _| (2.0 * x).sin() * y.cos() + x.cos()).to_spectral();
        let u = velocity_from_vorticity(&w).unwrap();
        let back = ops::vorticity_component(&u, 1, 2).unwrap();
        assert!(back.sub(&w).unwrap().max_abs() < 1e-14);
        assert!(ops::div_h(&u).unwrap().max_abs() < 1e-15);
    }
}
