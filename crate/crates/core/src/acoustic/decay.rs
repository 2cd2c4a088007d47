use serde::{Deserialize, Serialize};

use crate::acoustic::{complement_project, truncate, AcousticBasis};
use crate::error::{Error, Result};
use crate::par;
use crate::solver::ACState;
use crate::spectral::{weighted_norm_sq, Grid, ScalarField, SubBox};

/// `exp(i sqrt(-Laplacian) t) v` for real `v`, returned as the real and
/// imaginary parts `(cos(|k| t) v, sin(|k| t) v)`.
pub fn half_wave(v: &ScalarField, t: f64) -> Result<(ScalarField, ScalarField)> {
    let re = v.map_modes(v.parity(), |m, c| c * (m.total_sq().sqrt() * t).cos())?;
    let im = v.map_modes(v.parity(), |m, c| c * (m.total_sq().sqrt() * t).sin())?;
    Ok((re, im))
}

/// Latest time before a wave leaving `k` at speed `eps^-m` can re-enter it
/// through a periodic image.
pub fn recurrence_time(grid: &Grid, k: &SubBox, m: f64, eps: f64) -> f64 {
    (0.5 * grid.l_h() - 0.5 * k.diameter()) * eps.powf(m)
}

/// `int_0^T int_K |exp(i sqrt(-Laplacian) t / eps^m) v|^2 dx dt` by the
/// trapezoidal rule on `n_t` intervals.
pub fn local_decay_functional(v: &ScalarField, m: f64, eps: f64, t_final: f64, k: &SubBox, n_t: usize) -> Result<f64> {
    let g = v.grid();
    if k.side > 0.5 * g.l_h() * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("K side {} exceeds L_h / 2", k.side)));
    }
    let t_rec = recurrence_time(g, k, m, eps);
    if t_final > t_rec {
        return Err(Error::Recurrence { t_final, t_rec });
    }
    Ok(local_decay_integral(v, m, eps, t_final, k, n_t))
}

/// The same quadrature without the recurrence guard or the size limit on `K`.
pub fn local_decay_integral(v: &ScalarField, m: f64, eps: f64, t_final: f64, k: &SubBox, n_t: usize) -> f64 {
    let g = v.grid();
    let n_t = n_t.max(1);
    let v = v.to_spectral();
    let mask = k.mask(g);
    let scale = eps.powf(-m);
    let vals = par::map_collect(n_t + 1, |j| {
        let t = t_final * j as f64 / n_t as f64;
        let (re, im) = half_wave(&v, t * scale).expect("spectral field");
        weighted_norm_sq(&re, &mask) + weighted_norm_sq(&im, &mask)
    });
    trapezoid(&vals, t_final / n_t as f64)
}

pub fn trapezoid(vals: &[f64], h: f64) -> f64 {
    match vals.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (vals[0] + vals[n - 1]) + vals[1..n - 1].iter().sum::<f64>()),
    }
}

/// Smooth horizontal cutoff `chi` with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cutoff {
    /// `chi = 1` everywhere (no localization).
    One,
    /// `exp(1 - 1 / (1 - rho^2))` for `rho = |x_h - center| / radius < 1`.
    Bump { center: [f64; 2], radius: f64 },
    /// Values given per horizontal grid point, `ix * N_h + iy`.
    Samples(Vec<f64>),
}

impl Cutoff {
    pub fn centered_bump(grid: &Grid, radius_fraction: f64) -> Self {
        let l = grid.l_h();
        Cutoff::Bump {
            center: [0.5 * l, 0.5 * l],
            radius: radius_fraction * l,
        }
    }

    /// Weights on every physical sample.
    pub fn weights(&self, grid: &Grid) -> Result<Vec<f64>> {
        let (n_h, n_z) = (grid.n_h(), grid.n_z());
        let mut w = Vec::with_capacity(grid.n_phys());
        match self {
            Cutoff::One => w.resize(grid.n_phys(), 1.0),
            Cutoff::Bump { center, radius } => {
                if !(*radius > 0.0 && *radius <= 0.5 * grid.l_h()) {
                    return Err(Error::InvalidParameter(format!("cutoff radius {radius}")));
                }
                for ix in 0..n_h {
                    for iy in 0..n_h {
                        let dx = grid.x_h(ix) - center[0];
                        let dy = grid.x_h(iy) - center[1];
                        let rho2 = (dx * dx + dy * dy) / (radius * radius);
                        let chi = if rho2 < 1.0 {
                            (1.0 - 1.0 / (1.0 - rho2)).exp()
                        } else {
                            0.0
                        };
                        w.extend(std::iter::repeat_n(chi, n_z));
                    }
                }
            }
            Cutoff::Samples(s) => {
                if s.len() != n_h * n_h {
                    return Err(Error::InvalidParameter("cutoff sample count".into()));
                }
                if let Some(bad) = s.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    return Err(Error::InvalidParameter(format!("cutoff value {bad} outside [0, 1]")));
                }
                for &c in s {
                    w.extend(std::iter::repeat_n(c, n_z));
                }
            }
        }
        Ok(w)
    }
}

/// `int chi (|u|^2 + |p|^2)`.
pub fn localized_norm_sq(s: &ACState, w: &[f64]) -> f64 {
    s.u.comps.iter().map(|c| weighted_norm_sq(c, w)).sum::<f64>() + weighted_norm_sq(&s.p, w)
}

/// `(1/T) int_0^T |sqrt(C) exp(-t W / eps) Q_perp x|^2 dt` with
/// `C v = P_M [chi v]`, for `x` already in `H_M`. Trapezoidal in time.
pub fn rage_functional(
    basis: &AcousticBasis,
    x: &ACState,
    chi: &Cutoff,
    eps: f64,
    t_final: f64,
    cutoff: f64,
    n_t: usize,
) -> Result<f64> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter(format!("T = {t_final} must be positive")));
    }
    let w = chi.weights(basis.grid())?;
    let y = truncate(&complement_project(x), cutoff);
    let n_t = n_t.max(1);
    let vals = par::map_collect(n_t + 1, |j| {
        let t = t_final * j as f64 / n_t as f64;
        localized_norm_sq(&basis.evolve(&y, eps, t), &w)
    });
    Ok(trapezoid(&vals, t_final / n_t as f64) / t_final)
}

/// Same average for states already evolved in time (e.g. samples of a full
/// run), equally spaced over `[0, T]`: projects each sample with
/// `P_M Q_perp` and averages the localized norm.
pub fn rage_of_states(states: &[ACState], chi: &Cutoff, cutoff: f64) -> Result<f64> {
    let Some(first) = states.first() else { return Ok(0.0) };
    let w = chi.weights(first.grid())?;
    let vals: Vec<f64> = states
        .iter()
        .map(|s| localized_norm_sq(&truncate(&complement_project(s), cutoff), &w))
        .collect();
    if vals.len() < 2 {
        return Ok(vals[0]);
    }
    Ok(trapezoid(&vals, 1.0) / (vals.len() - 1) as f64)
}
