use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::par;
use crate::solver::{ACParams, ACState};
use crate::spectral::{Grid, Mode};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Per-mode generator `d/dt (u1, u2, u3, p) = M (u1, u2, u3, p)`.
///
/// Horizontal derivatives act as `i xi`, the vertical derivative maps cosine
/// to `-kappa` sine and sine to `+kappa` cosine, so the coupling between
/// `u3` (sine) and `p` (cosine) is real.
pub fn mode_matrix(params: &ACParams, m: &Mode) -> Matrix4<C> {
    let a = params.mach_sq();
    let r = 1.0 / params.eps;
    let d = C::new(-params.mu * m.total_sq(), 0.0);
    let ix1 = C::new(0.0, m.xi1 / a);
    let ix2 = C::new(0.0, m.xi2 / a);
    let kz = C::new(m.kappa / a, 0.0);
    let rc = C::new(r, 0.0);
    Matrix4::new(
        d, rc, ZERO, -ix1, //
        -rc, d, ZERO, -ix2, //
        ZERO, ZERO, d, kz, //
        -ix1, -ix2, -kz, ZERO,
    )
}

/// Eigenvalues of [`mode_matrix`] from a dense Schur decomposition, sorted by
/// imaginary part then real part.
pub fn mode_eigenvalues(params: &ACParams, m: &Mode) -> [C; 4] {
    let mat = mode_matrix(params, m);
    let ev = mat.schur().eigenvalues().expect("complex Schur form is triangular");
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|x, y| x.im.total_cmp(&y.im).then(x.re.total_cmp(&y.re)));
    out
}

/// Eigenpairs of a skew-Hermitian mode matrix (`mu = 0`): `M = V diag(i w) V^H`
/// with `V` unitary, computed from the Hermitian matrix `-i M`.
pub fn skew_eigen(params: &ACParams, m: &Mode) -> (Vector4<f64>, Matrix4<C>) {
    let h = mode_matrix(params, m) * C::new(0.0, -1.0);
    let h = (h + h.adjoint()) * C::new(0.5, 0.0);
    let e = h.symmetric_eigen();
    (e.eigenvalues, e.eigenvectors)
}

/// Cached `exp(h M)` for every coefficient slot of a grid.
pub struct Propagator {
    pub h: f64,
    pub params: ACParams,
    mats: Vec<Matrix4<C>>,
}

impl Propagator {
    pub fn new(grid: &Arc<Grid>, params: &ACParams, h: f64) -> Self {
        let mats = par::map_collect(grid.n_spec(), |idx| {
            let m = grid.mode(idx);
            (mode_matrix(params, &m) * C::new(h, 0.0)).exp()
        });
        Self {
            h,
            params: *params,
            mats,
        }
    }

    pub fn matrix(&self, idx: usize) -> &Matrix4<C> {
        &self.mats[idx]
    }

    /// Applies the cached exponential to every mode; advances `t` by `h`.
    pub fn apply(&self, state: &ACState) -> ACState {
        let v = state.mode_vectors();
        let out = par::map_collect(v.len(), |i| {
            let x = Vector4::from(v[i]);
            let y = self.mats[i] * x;
            [y[0], y[1], y[2], y[3]]
        });
        ACState::from_mode_vectors(state.grid(), &out, state.t + self.h)
    }
}

/// Exact linear flow over `dt` (no caching).
pub fn linear_phase(state: &ACState, params: &ACParams, dt: f64) -> ACState {
    Propagator::new(state.grid(), params, dt).apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    fn mode(xi1: f64, xi2: f64, kappa: f64) -> Mode {
        Mode {
            n1: 0,
            n2: 0,
            k: 0,
            xi1,
            xi2,
            kappa,
        }
    }

    #[test]
    fn skew_hermitian_without_viscosity() {
        let p = ACParams::new(0.3, 1.0, 0.0).unwrap();
        let m = mode_matrix(&p, &mode(0.7, -1.3, 2.0 * PI));
        assert!((m + m.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn rest_mode_is_pure_rotation() {
        let eps = 0.25;
        let p = ACParams::new(eps, 0.5, 0.0).unwrap();
        let ev = mode_eigenvalues(&p, &mode(0.0, 0.0, 0.0));
        let want = [-1.0 / eps, 0.0, 0.0, 1.0 / eps];
        for (l, w) in ev.iter().zip(want) {
            assert!(l.re.abs() < 1e-12 && (l.im - w).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn viscous_modes_decay() {
        let p = ACParams::new(0.1, 1.0, 1.0).unwrap();
        for ev in mode_eigenvalues(&p, &mode(1.0, 2.0, 2.0 * PI)) {
            assert!(ev.re < 0.0);
        }
    }

    #[test]
    fn skew_eigen_reconstructs() {
        let p = ACParams::new(0.2, 0.5, 0.0).unwrap();
        let md = mode(0.5, 1.5, 4.0 * PI);
        let (w, v) = skew_eigen(&p, &md);
        let d = Matrix4::from_diagonal(&w.map(|x| C::new(0.0, x)));
        let back = v * d * v.adjoint();
        assert!((back - mode_matrix(&p, &md)).norm() < 1e-10);
    }

    #[test]
    fn propagator_is_unitary_without_viscosity() {
        let g = Grid::new(2.0 * PI, 8, 4, 2.0 / 3.0).unwrap();
        let p = ACParams::new(0.05, 1.0, 0.0).unwrap();
        let prop = Propagator::new(&g, &p, 1e-2);
        for idx in 0..g.n_spec() {
            let e = prop.matrix(idx);
            assert!((e.adjoint() * e - Matrix4::identity()).norm() < 1e-12);
        }
    }
}
