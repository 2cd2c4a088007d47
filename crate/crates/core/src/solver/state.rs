use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ops, Grid, Parity, ScalarField, VectorField};

/// Rossby number `eps`, Mach exponent `beta` and viscosity `mu`. Rotation is
/// about `g = (0, 0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ACParams {
    pub eps: f64,
    pub beta: f64,
    pub mu: f64,
}

impl ACParams {
    pub fn new(eps: f64, beta: f64, mu: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} must be positive")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be positive")));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidParameter(format!("mu = {mu} must be >= 0")));
        }
        if beta != 0.5 && beta < 1.0 {
            log::warn!("beta = {beta} is outside {{1/2}} U [1, inf)");
        }
        Ok(Self { eps, beta, mu })
    }

    /// `eps^(2 beta)`, the coefficient of `dp/dt`.
    pub fn mach_sq(&self) -> f64 {
        self.eps.powf(2.0 * self.beta)
    }
}

/// Velocity (even, even, odd) and pressure (even) at time `t`.
#[derive(Clone, Debug)]
pub struct ACState {
    pub u: VectorField,
    pub p: ScalarField,
    pub t: f64,
}

impl ACState {
    pub fn new(u: VectorField, p: ScalarField, t: f64) -> Result<Self> {
        if u.parities() != crate::spectral::VELOCITY_PARITY || p.parity() != Parity::Even {
            return Err(Error::Parity("state needs u (even, even, odd) and p even".into()));
        }
        if !u.grid().same_as(p.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            u: u.to_spectral(),
            p: p.to_spectral(),
            t,
        })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            u: VectorField::zeros(grid),
            p: ScalarField::zeros(grid, Parity::Even),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.p.grid()
    }

    /// `E = (|u|^2 + |p|^2) / 2`.
    pub fn energy(&self) -> f64 {
        0.5 * (self.u.norm_sq() + self.p.norm_sq())
    }

    /// `sum_ij |d_j u_i|^2`.
    pub fn grad_norm_sq(&self) -> f64 {
        self.u
            .comps
            .iter()
            .map(|c| {
                let l = ops::laplacian(c).expect("spectral state");
                -c.inner(&l).expect("same grid").re
            })
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.p.is_finite()
    }

    /// Per-mode 4-vector `(u1, u2, u3, p)` at coefficient slot `idx`.
    pub fn mode_vector(&self, idx: usize) -> [Complex64; 4] {
        let c = |f: &ScalarField| f.coeffs().expect("spectral state")[idx];
        [
            c(&self.u.comps[0]),
            c(&self.u.comps[1]),
            c(&self.u.comps[2]),
            c(&self.p),
        ]
    }

    /// Rebuilds a state from per-mode 4-vectors.
    pub fn from_mode_vectors(grid: &Arc<Grid>, v: &[[Complex64; 4]], t: f64) -> Self {
        let parts: [Vec<Complex64>; 4] = std::array::from_fn(|j| v.iter().map(|x| x[j]).collect());
        let [a, b, c, d] = parts;
        Self {
            u: VectorField::new([
                ScalarField::from_coeffs(grid, Parity::Even, a),
                ScalarField::from_coeffs(grid, Parity::Even, b),
                ScalarField::from_coeffs(grid, Parity::Odd, c),
            ]),
            p: ScalarField::from_coeffs(grid, Parity::Even, d),
            t,
        }
    }

    pub fn mode_vectors(&self) -> Vec<[Complex64; 4]> {
        let a = self.u.comps[0].coeffs().expect("spectral state");
        let b = self.u.comps[1].coeffs().expect("spectral state");
        let c = self.u.comps[2].coeffs().expect("spectral state");
        let d = self.p.coeffs().expect("spectral state");
        (0..a.len()).map(|i| [a[i], b[i], c[i], d[i]]).collect()
    }

    /// `a * self + b * other` (time taken from `self`).
    pub fn lin_comb(&self, a: f64, other: &ACState, b: f64) -> Result<ACState> {
        Ok(Self {
            u: self.u.lin_comb(a, &other.u, b)?,
            p: self.p.lin_comb(a, &other.p, b)?,
            t: self.t,
        })
    }

    pub fn sub(&self, other: &ACState) -> Result<ACState> {
        self.lin_comb(1.0, other, -1.0)
    }

    /// `sqrt(|u|^2 + |p|^2)`.
    pub fn norm(&self) -> f64 {
        (self.u.norm_sq() + self.p.norm_sq()).sqrt()
    }

    /// Weighted complex pairing of two states.
    pub fn inner(&self, other: &ACState) -> Result<Complex64> {
        Ok(self.u.inner(&other.u)? + self.p.inner(&other.p)?)
    }
}
