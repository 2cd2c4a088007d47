use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::linear::Propagator;
use crate::solver::nonlinear::nonlinear_rhs_with_max;
use crate::solver::{ACParams, ACState};
use crate::spectral::{Grid, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    /// Include the transport term. Off gives the exact linear flow.
    pub nonlinear: bool,
    /// CFL number `c` in `dt <= c dx / max|u|`.
    pub cfl: f64,
    /// Treat a CFL violation as an error instead of a warning.
    pub strict_cfl: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            nonlinear: true,
            cfl: 0.5,
            strict_cfl: false,
        }
    }
}

/// Strang splitting `L(dt/2) N(dt) L(dt/2)` with cached per-mode exponentials
/// and a classical RK4 substep for the nonlinearity.
pub struct Stepper {
    grid: Arc<Grid>,
    params: ACParams,
    dt: f64,
    opts: StepOptions,
    half: Option<Propagator>,
    full: Option<Propagator>,
    warned: AtomicBool,
}

/// Result of one step: the new state and the energy removed by viscosity.
pub struct StepOutcome {
    pub state: ACState,
    pub viscous_loss: f64,
    pub max_speed: f64,
}

impl Stepper {
    pub fn new(grid: &Arc<Grid>, params: ACParams, dt: f64, opts: StepOptions) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        let (half, full) = if opts.nonlinear {
            (Some(Propagator::new(grid, &params, 0.5 * dt)), None)
        } else {
            (None, Some(Propagator::new(grid, &params, dt)))
        };
        Ok(Self {
            grid: grid.clone(),
            params,
            dt,
            opts,
            half,
            full,
            warned: AtomicBool::new(false),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &ACParams {
        &self.params
    }

    fn viscous(&self, before: &ACState, after: &ACState) -> f64 {
        if self.params.mu > 0.0 {
            (before.energy() - after.energy()).max(0.0)
        } else {
            0.0
        }
    }

    pub fn step(&self, s: &ACState) -> Result<StepOutcome> {
        if let Some(full) = &self.full {
            let out = full.apply(s);
            let loss = self.viscous(s, &out);
            return Ok(StepOutcome {
                state: out,
                viscous_loss: loss,
                max_speed: 0.0,
            });
        }
        let half = self.half.as_ref().expect("nonlinear stepper has a half propagator");
        let s1 = half.apply(s);
        let (u2, umax) = self.rk4(&s1.u)?;
        self.check_cfl(umax)?;
        let s2 = ACState {
            u: u2,
            p: s1.p.clone(),
            t: s1.t,
        };
        let s3 = half.apply(&s2);
        let loss = self.viscous(s, &s1) + self.viscous(&s2, &s3);
        Ok(StepOutcome {
            state: s3,
            viscous_loss: loss,
            max_speed: umax,
        })
    }

    fn rk4(&self, u: &VectorField) -> Result<(VectorField, f64)> {
        let h = self.dt;
        let (k1, umax) = nonlinear_rhs_with_max(u)?;
        let (k2, _) = nonlinear_rhs_with_max(&u.lin_comb(1.0, &k1, 0.5 * h)?)?;
        let (k3, _) = nonlinear_rhs_with_max(&u.lin_comb(1.0, &k2, 0.5 * h)?)?;
        let (k4, _) = nonlinear_rhs_with_max(&u.lin_comb(1.0, &k3, h)?)?;
        let incr = k1.add(&k4)?.lin_comb(1.0, &k2.add(&k3)?, 2.0)?;
        Ok((u.lin_comb(1.0, &incr, h / 6.0)?, umax))
    }

    fn check_cfl(&self, umax: f64) -> Result<()> {
        if umax <= 0.0 || !umax.is_finite() {
            return Ok(());
        }
        let limit = self.opts.cfl * self.grid.min_spacing() / umax;
        if self.dt > limit {
            if self.opts.strict_cfl {
                return Err(Error::Cfl { dt: self.dt, limit });
            }
            if !self.warned.swap(true, Ordering::Relaxed) {
                log::warn!("dt = {:.3e} exceeds CFL limit {:.3e}", self.dt, limit);
            }
        }
        Ok(())
    }
}

/// One step from scratch (builds the propagators each call).
pub fn step(state: &ACState, params: &ACParams, dt: f64, opts: StepOptions) -> Result<ACState> {
    Ok(Stepper::new(state.grid(), *params, dt, opts)?.step(state)?.state)
}

/// Running diagnostics handed to observers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Diagnostics {
    pub step: usize,
    pub energy: f64,
    /// `int_0^t |grad u|^2 dt`; exact viscous loss over `mu` when `mu > 0`,
    /// trapezoidal otherwise.
    pub dissipation_integral: f64,
    pub max_speed: f64,
}

/// Runs to time `t_final`, calling `observe` on the initial state and then
/// every `every` steps (and always at the final step). `dt` is shrunk
/// slightly if needed so that an integer number of steps lands on `t_final`.
pub fn run_observed<F>(
    params: &ACParams,
    ic: &ACState,
    t_final: f64,
    dt: f64,
    every: usize,
    opts: StepOptions,
    mut observe: F,
) -> Result<usize>
where
    F: FnMut(&ACState, &Diagnostics) -> Result<()>,
{
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidParameter(format!("T = {t_final} must be positive")));
    }
    let steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let stepper = Stepper::new(ic.grid(), *params, dt, opts)?;
    let every = every.max(1);
    let mut s = ic.clone();
    s.u = s.u.to_spectral();
    s.p = s.p.to_spectral();
    let mut diag = Diagnostics {
        step: 0,
        energy: s.energy(),
        dissipation_integral: 0.0,
        max_speed: 0.0,
    };
    let mut grad_prev = if params.mu > 0.0 { 0.0 } else { s.grad_norm_sq() };
    observe(&s, &diag)?;
    for n in 1..=steps {
        let out = stepper.step(&s)?;
        s = out.state;
        s.t = ic.t + n as f64 * dt;
        if !s.is_finite() {
            return Err(Error::NonFinite { step: n, t: s.t });
        }
        if params.mu > 0.0 {
            diag.dissipation_integral += out.viscous_loss / params.mu;
        } else {
            let g = s.grad_norm_sq();
            diag.dissipation_integral += 0.5 * dt * (grad_prev + g);
            grad_prev = g;
        }
        diag.step = n;
        diag.max_speed = out.max_speed;
        if n % every == 0 || n == steps {
            diag.energy = s.energy();
            observe(&s, &diag)?;
        }
    }
    Ok(steps)
}

/// Stored snapshots of a run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: ACParams,
    pub dt: f64,
    pub snapshots: Vec<ACState>,
    pub energies: Vec<f64>,
    /// Running `int_0^t |grad u|^2 dt` at each snapshot.
    pub dissipation_integral: Vec<f64>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

pub fn run(
    params: &ACParams,
    ic: &ACState,
    t_final: f64,
    dt: f64,
    snap_every: usize,
    opts: StepOptions,
) -> Result<Trajectory> {
    let mut snaps = Vec::new();
    let mut energies = Vec::new();
    let mut diss = Vec::new();
    let steps = run_observed(params, ic, t_final, dt, snap_every, opts, |s, d| {
        snaps.push(s.clone());
        energies.push(d.energy);
        diss.push(d.dissipation_integral);
        Ok(())
    })?;
    Ok(Trajectory {
        params: *params,
        dt: t_final / steps as f64,
        snapshots: snaps,
        energies,
        dissipation_integral: diss,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnergyReport {
    pub passed: bool,
    pub tol: f64,
    /// Largest `(E(t) + mu D(t)) / E(0) - 1` over snapshots.
    pub worst_excess: f64,
    /// Snapshot indices where the inequality fails.
    pub violations: Vec<usize>,
}

/// Checks `E(t) + mu int_0^t |grad u|^2 <= E(0) (1 + tol)` at every snapshot.
pub fn check_energy(traj: &Trajectory, tol: f64) -> EnergyReport {
    energy_report(&traj.energies, &traj.dissipation_integral, traj.params.mu, tol)
}

pub fn energy_report(energies: &[f64], dissipation: &[f64], mu: f64, tol: f64) -> EnergyReport {
    let e0 = energies.first().copied().unwrap_or(0.0);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for (i, (e, d)) in energies.iter().zip(dissipation).enumerate() {
        let lhs = e + mu * d;
        let excess = if e0 > 0.0 { lhs / e0 - 1.0 } else { lhs };
        worst = worst.max(excess);
        if lhs > e0 * (1.0 + tol) || !lhs.is_finite() {
            violations.push(i);
        }
    }
    EnergyReport {
        passed: violations.is_empty(),
        tol,
        worst_excess: if worst.is_finite() { worst } else { 0.0 },
        violations,
    }
}

/// Flat `key = value` provenance block.
pub fn run_metadata(params: &ACParams, grid: &Grid, dt: f64, seed: Option<u64>) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    kv("eps", format!("{:e}", params.eps));
    kv("beta", format!("{}", params.beta));
    kv("mu", format!("{}", params.mu));
    kv("dt", format!("{:e}", dt));
    kv("l_h", format!("{}", grid.l_h()));
    kv("n_h", grid.n_h().to_string());
    kv("n_v", grid.n_v().to_string());
    kv("dealias_fraction", format!("{}", grid.dealias_fraction()));
    if let Some(seed) = seed {
        kv("seed", seed.to_string());
    }
    kv("version", env!("CARGO_PKG_VERSION").to_string());
    s
}
