use std::io::Write;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::Result;
use crate::par;
use crate::solver::ACState;
use crate::spectral::ops::{self, Axis};
use crate::spectral::{Grid, Mode, ScalarField, VectorField};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Closed-form eigenvalues of the propagator symbol at horizontal wavevector
/// of squared length `xi_sq` and vertical wavenumber `kappa`:
/// `lambda^2 = -(s +- sqrt(s^2 - 4 kappa^2)) / 2`, `s = 1 + xi_sq + kappa^2`.
/// Sorted by imaginary part.
pub fn eigenvalues(xi_sq: f64, kappa: f64) -> [C; 4] {
    let s = 1.0 + xi_sq + kappa * kappa;
    let disc = (s * s - 4.0 * kappa * kappa).max(0.0).sqrt();
    let big = (0.5 * (s + disc)).sqrt();
    // (s - disc) / 2 = 2 kappa^2 / (s + disc) avoids cancellation.
    let small = (2.0 * kappa * kappa / (s + disc)).sqrt();
    [
        C::new(0.0, -big),
        C::new(0.0, -small),
        C::new(0.0, small),
        C::new(0.0, big),
    ]
}

/// Per-mode eigenstructure of the propagator.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBlock {
    pub xi_h: [f64; 2],
    pub k: usize,
    pub kappa: f64,
    pub eigenvalues: [C; 4],
    /// Unit null vector in `(u1, u2, u3, p)` order; present iff `k = 0`.
    pub kernel_vector: Option<[C; 4]>,
}

impl ModeBlock {
    pub fn new(m: &Mode) -> Self {
        Self {
            xi_h: [m.xi1, m.xi2],
            k: m.k,
            kappa: m.kappa,
            eigenvalues: eigenvalues(m.xi_h_sq(), m.kappa),
            kernel_vector: (m.k == 0).then(|| kernel_vector(m.xi1, m.xi2)),
        }
    }
}

/// `(-i xi2, i xi1, 0, 1) / sqrt(1 + |xi|^2)`: the mode of `p` with
/// `u = (-d2 p, d1 p, 0)`.
pub fn kernel_vector(xi1: f64, xi2: f64) -> [C; 4] {
    let n = (1.0 + xi1 * xi1 + xi2 * xi2).sqrt();
    [C::new(0.0, -xi2 / n), C::new(0.0, xi1 / n), ZERO, C::new(1.0 / n, 0.0)]
}

/// Symbol of `W(p, u) = (div u, g x u + grad p)` acting on `(u1, u2, u3, p)`.
pub fn w_matrix(m: &Mode) -> Matrix4<C> {
    let i1 = C::new(0.0, m.xi1);
    let i2 = C::new(0.0, m.xi2);
    let k = C::new(m.kappa, 0.0);
    let one = C::new(1.0, 0.0);
    Matrix4::new(
        ZERO, -one, ZERO, i1, //
        one, ZERO, ZERO, i2, //
        ZERO, ZERO, ZERO, -k, //
        i1, i2, k, ZERO,
    )
}

/// `W(p, u) = (div u, g x u + grad p)`, returned as `(scalar, vector)`.
#[allow(non_snake_case)]
pub fn apply_W(p: &ScalarField, u: &VectorField) -> Result<(ScalarField, VectorField)> {
    let d = ops::div(u)?;
    let v = VectorField::new([
        ops::diff(p, Axis::X1)?.sub(&u.comps[1])?,
        ops::diff(p, Axis::X2)?.add(&u.comps[0])?,
        ops::diff(p, Axis::X3)?,
    ]);
    Ok((d, v))
}

fn map_state(s: &ACState, f: impl Fn(usize, &Mode, [C; 4]) -> [C; 4] + Sync + Send) -> ACState {
    let g = s.grid().clone();
    let v = s.mode_vectors();
    let out = par::map_collect(v.len(), |i| f(i, &g.mode(i), v[i]));
    ACState::from_mode_vectors(&g, &out, s.t)
}

/// Orthogonal projection `Q` onto the kernel of `W`.
pub fn kernel_project(s: &ACState) -> ACState {
    let g = s.grid().clone();
    map_state(s, |i, m, x| {
        let (ix, iy, _) = g.spec_coords(i);
        if m.k != 0 || g.is_nyquist(ix) || g.is_nyquist(iy) {
            return [ZERO; 4];
        }
        let v = kernel_vector(m.xi1, m.xi2);
        let c: C = (0..4).map(|j| v[j].conj() * x[j]).sum();
        v.map(|vj| vj * c)
    })
}

/// `Q_perp = I - Q`.
pub fn complement_project(s: &ACState) -> ACState {
    let q = kernel_project(s);
    s.sub(&q).expect("same grid")
}

/// Whether a mode lies in `H_M`: `|xi_h| + |kappa| <= M` (physical wavenumbers).
pub fn in_band(m: &Mode, cutoff: f64) -> bool {
    m.xi_h() + m.kappa.abs() <= cutoff * (1.0 + 1e-12)
}

/// Orthogonal projection `P_M` onto `H_M`.
pub fn truncate(s: &ACState, cutoff: f64) -> ACState {
    map_state(s, |_, m, x| if in_band(m, cutoff) { x } else { [ZERO; 4] })
}

/// Per-mode unitary diagonalization `W = -i V diag(w) V^H`, used to apply
/// `exp(-t W / eps)` at arbitrary `t` without re-exponentiating.
pub struct AcousticBasis {
    grid: Arc<Grid>,
    blocks: Vec<(Vector4<f64>, Matrix4<C>)>,
}

impl AcousticBasis {
    pub fn new(grid: &Arc<Grid>) -> Self {
        let blocks = par::map_collect(grid.n_spec(), |i| {
            let h = w_matrix(&grid.mode(i)) * C::new(0.0, 1.0);
            let h = (h + h.adjoint()) * C::new(0.5, 0.0);
            let e = h.symmetric_eigen();
            (e.eigenvalues, e.eigenvectors)
        });
        Self {
            grid: grid.clone(),
            blocks,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Frequencies `w` of mode `idx` (eigenvalues of `i W`).
    pub fn frequencies(&self, idx: usize) -> Vector4<f64> {
        self.blocks[idx].0
    }

    /// `exp(-t W / eps) x`; the time stamp of the result is `x.t + t`.
    pub fn evolve(&self, x: &ACState, eps: f64, t: f64) -> ACState {
        let v = x.mode_vectors();
        let out = par::map_collect(v.len(), |i| {
            let (w, vecs) = &self.blocks[i];
            let c = vecs.adjoint() * Vector4::from(v[i]);
            let c = Vector4::from_fn(|j, _| c[j] * C::from_polar(1.0, w[j] * t / eps));
            let y = vecs * c;
            [y[0], y[1], y[2], y[3]]
        });
        ACState::from_mode_vectors(&self.grid, &out, x.t + t)
    }
}

/// Writes `kx ky kz re_l1 im_l1 .. re_l4 im_l4 has_kernel` for every mode.
pub fn write_mode_table<W: Write>(w: &mut W, grid: &Grid) -> Result<()> {
    writeln!(w, "kx,ky,kz,re_l1,im_l1,re_l2,im_l2,re_l3,im_l3,re_l4,im_l4,has_kernel")?;
    let mut rows = Vec::new();
    for idx in 0..grid.n_spec() {
        let (ix, iy, _) = grid.spec_coords(idx);
        if grid.is_nyquist(ix) || grid.is_nyquist(iy) {
            continue;
        }
        rows.push(grid.mode(idx));
    }
    rows.sort_by_key(|m| (m.n1, m.n2, m.k));
    for m in rows {
        let b = ModeBlock::new(&m);
        write!(w, "{},{},{}", m.n1, m.n2, m.k)?;
        for l in b.eigenvalues {
            write!(w, ",{:.16e},{:.16e}", l.re, l.im)?;
        }
        writeln!(w, ",{}", b.kernel_vector.is_some() as u8)?;
    }
    Ok(())
}
