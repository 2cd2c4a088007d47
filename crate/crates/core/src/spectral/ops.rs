//! Spectral differential operators, the Leray splitting and the vertical
//! structure operators (average, oscillation, antiderivative).
//!
//! All operators act on coefficient-space fields. In the cosine/sine basis a
//! vertical derivative maps `cos(kz) -> -kappa sin(kz)` and
//! `sin(kz) -> kappa cos(kz)`, so it flips parity; horizontal derivatives
//! multiply by `i xi_j` and keep it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Parity, ScalarField, VectorField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn from_index(i: usize) -> Option<Axis> {
        match i {
            1 => Some(Axis::X1),
            2 => Some(Axis::X2),
            3 => Some(Axis::X3),
            _ => None,
        }
    }
}

pub fn diff(f: &ScalarField, axis: Axis) -> Result<ScalarField> {
    f.coeffs()?;
    match axis {
        Axis::X1 => f.map_modes(f.parity(), |m, c| I * m.xi1 * c),
        Axis::X2 => f.map_modes(f.parity(), |m, c| I * m.xi2 * c),
        Axis::X3 => {
            let sign = match f.parity() {
                Parity::Even => -1.0,
                Parity::Odd => 1.0,
            };
            f.map_modes(f.parity().flip(), |m, c| c * (sign * m.kappa))
        }
    }
}

pub fn grad(f: &ScalarField) -> Result<VectorField> {
    Ok(VectorField::new([
        diff(f, Axis::X1)?,
        diff(f, Axis::X2)?,
        diff(f, Axis::X3)?,
    ]))
}

/// Horizontal gradient as a vector with zero vertical component.
pub fn grad_h(f: &ScalarField) -> Result<VectorField> {
    let third = ScalarField::zeros(f.grid(), f.parity().flip());
    Ok(VectorField::new([diff(f, Axis::X1)?, diff(f, Axis::X2)?, third]))
}

pub fn div(u: &VectorField) -> Result<ScalarField> {
    let a = diff(&u.comps[0], Axis::X1)?;
    let b = diff(&u.comps[1], Axis::X2)?;
    let c = diff(&u.comps[2], Axis::X3)?;
    a.add(&b)?.add(&c)
}

pub fn div_h(u: &VectorField) -> Result<ScalarField> {
    diff(&u.comps[0], Axis::X1)?.add(&diff(&u.comps[1], Axis::X2)?)
}

pub fn laplacian(f: &ScalarField) -> Result<ScalarField> {
    f.map_modes(f.parity(), |m, c| -m.total_sq() * c)
}

pub fn laplacian_h(f: &ScalarField) -> Result<ScalarField> {
    f.map_modes(f.parity(), |m, c| -m.xi_h_sq() * c)
}

/// Solves `Laplacian psi = f` with the zero mode of `psi` set to 0.
pub fn inverse_laplacian(f: &ScalarField) -> Result<ScalarField> {
    f.map_modes(f.parity(), |m, c| {
        let q = m.total_sq();
        if q == 0.0 {
            ZERO
        } else {
            -c / q
        }
    })
}

/// Solenoidal part `Z = P u` and potential `Psi` with `Q u = grad Psi`.
#[derive(Clone, Debug)]
pub struct HelmholtzParts {
    pub solenoidal: VectorField,
    pub potential: ScalarField,
}

impl HelmholtzParts {
    pub fn gradient(&self) -> Result<VectorField> {
        grad(&self.potential)
    }
}

/// Leray splitting `u = Z + grad Psi`, `Laplacian Psi = div u`, per mode.
pub fn leray_decompose(u: &VectorField) -> Result<HelmholtzParts> {
    let psi = inverse_laplacian(&div(u)?)?;
    let g = grad(&psi)?;
    let z = u.sub(&g)?;
    Ok(HelmholtzParts {
        solenoidal: z,
        potential: psi,
    })
}

/// Leray projector `P` onto divergence-free fields.
pub fn project_solenoidal(u: &VectorField) -> Result<VectorField> {
    Ok(leray_decompose(u)?.solenoidal)
}

/// Complementary projector `Q = I - P` onto gradients.
pub fn project_gradient(u: &VectorField) -> Result<VectorField> {
    leray_decompose(u)?.gradient()
}

/// Vertical average `<f>(x_h)`, kept on the slab grid as an x3-independent
/// field. Odd fields average to zero.
pub fn vertical_average(f: &ScalarField) -> Result<ScalarField> {
    let n_v = f.grid().n_v();
    let c = f.coeffs()?;
    let out = match f.parity() {
        Parity::Odd => vec![ZERO; c.len()],
        Parity::Even => c
            .iter()
            .enumerate()
            .map(|(i, &z)| if i % n_v == 0 { z } else { ZERO })
            .collect(),
    };
    Ok(f.with_coeffs(f.parity(), out))
}

/// The `k = 0` layer of an even slab field as a field on the horizontal grid.
pub fn horizontal_slice(f: &ScalarField) -> Result<ScalarField> {
    if f.parity() != Parity::Even {
        return Err(Error::Parity("only even fields have a vertical mean".into()));
    }
    let g = f.grid();
    let h = g.horizontal_grid();
    let n_v = g.n_v();
    let c = f.coeffs()?;
    let out = (0..h.n_spec()).map(|i| c[i * n_v]).collect();
    Ok(ScalarField::from_coeffs(&h, Parity::Even, out))
}

/// Inverse of [`horizontal_slice`]: an x3-independent slab field.
pub fn extend_vertically(f: &ScalarField, slab: &std::sync::Arc<crate::spectral::Grid>) -> Result<ScalarField> {
    let h = f.grid();
    if !h.is_horizontal() || f.parity() != Parity::Even {
        return Err(Error::Parity("expected an even horizontal field".into()));
    }
    if h.n_h() != slab.n_h() || h.l_h() != slab.l_h() {
        return Err(Error::GridMismatch);
    }
    let c = f.coeffs()?;
    let n_v = slab.n_v();
    let mut out = vec![ZERO; slab.n_spec()];
    for (i, &z) in c.iter().enumerate() {
        out[i * n_v] = z;
    }
    Ok(ScalarField::from_coeffs(slab, Parity::Even, out))
}

/// Oscillation `{f} = f - <f>`.
pub fn oscillation(f: &ScalarField) -> Result<ScalarField> {
    f.sub(&vertical_average(f)?)
}

/// Zero-mean vertical antiderivative: `d/dx3 I[f] = f`, `<I[f]> = 0`.
/// Requires `<f> = 0`.
pub fn vertical_antiderivative(f: &ScalarField) -> Result<ScalarField> {
    let n_v = f.grid().n_v();
    let c = f.coeffs()?;
    if f.parity() == Parity::Even {
        let scale = c.iter().fold(0.0_f64, |m, z| m.max(z.norm())).max(1.0);
        let mean = c
            .iter()
            .enumerate()
            .filter(|(i, _)| i % n_v == 0)
            .fold(0.0_f64, |m, (_, z)| m.max(z.norm()));
        if mean > 1e-12 * scale {
            return Err(Error::NonzeroVerticalMean(mean));
        }
    }
    // even: c cos -> (c / kappa) sin ; odd: s sin -> -(s / kappa) cos
    let sign = match f.parity() {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    f.map_modes(
        f.parity().flip(),
        |m, z| {
            if m.k == 0 {
                ZERO
            } else {
                z * (sign / m.kappa)
            }
        },
    )
}

/// `omega_ij = d_i u_j - d_j u_i` for `i != j` in `1..=3`.
pub fn vorticity_component(u: &VectorField, i: usize, j: usize) -> Result<ScalarField> {
    if i == j {
        return Err(Error::SameAxes(i));
    }
    let ai = Axis::from_index(i).ok_or_else(|| Error::InvalidParameter(format!("axis {i}")))?;
    let aj = Axis::from_index(j).ok_or_else(|| Error::InvalidParameter(format!("axis {j}")))?;
    let a = diff(&u.comps[j - 1], ai)?;
    let b = diff(&u.comps[i - 1], aj)?;
    a.sub(&b)
}

/// 2/3-rule mask: zeroes every slot outside the retained band.
pub fn dealias(f: &ScalarField) -> Result<ScalarField> {
    let g = f.grid().clone();
    let c = f.coeffs()?;
    let out = c
        .iter()
        .enumerate()
        .map(|(idx, &z)| {
            let (ix, iy, k) = g.spec_coords(idx);
            if g.is_retained(ix, iy, k) {
                z
            } else {
                ZERO
            }
        })
        .collect();
    Ok(f.with_coeffs(f.parity(), out))
}

pub fn dealias_vector(u: &VectorField) -> Result<VectorField> {
    Ok(VectorField::new([
        dealias(&u.comps[0])?,
        dealias(&u.comps[1])?,
        dealias(&u.comps[2])?,
    ]))
}

/// In-place mask on raw coefficients.
pub(crate) fn dealias_in_place(g: &crate::spectral::Grid, c: &mut [Complex64]) {
    for (idx, z) in c.iter_mut().enumerate() {
        let (ix, iy, k) = g.spec_coords(idx);
        if !g.is_retained(ix, iy, k) {
            *z = ZERO;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, VELOCITY_PARITY};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid() -> Arc<Grid> {
        Grid::new(2.0 * PI, 16, 8, 2.0 / 3.0).unwrap()
    }

    fn random_vector(g: &Arc<Grid>, seed: u64) -> VectorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        VectorField::new(VELOCITY_PARITY.map(|p| ScalarField::random(g, p, &mut rng, |_| Some(1.0))))
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn vertical_derivative_of_sine() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Odd, |_, _, z| (2.0 * PI * z).sin()).to_spectral();
        let d = diff(&f, Axis::X3).unwrap();
        assert_eq!(d.parity(), Parity::Even);
        let want = ScalarField::from_fn(&g, Parity::Even, |_, _, z| 2.0 * PI * (2.0 * PI * z).cos()).to_spectral();
        assert!(max_diff(&d, &want) < 1e-12);
    }

    #[test]
    fn div_grad_is_laplacian() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let a = div(&grad(&f).unwrap()).unwrap();
        let b = laplacian(&f).unwrap();
        assert!(max_diff(&a, &b) <= 1e-12 * b.max_abs());
    }

    #[test]
    fn horizontal_gradient_of_vertical_profile_vanishes() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Even, |_, _, z| (6.0 * PI * z).cos()).to_spectral();
        assert!(grad_h(&f).unwrap().norm() < 1e-13);
        assert!(laplacian_h(&f).unwrap().norm() < 1e-13);
    }

    #[test]
    fn leray_of_gradient_and_of_solenoidal() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = ScalarField::random(&g, Parity::Even, &mut rng, |m| {
            (m.k > 0 || m.n1 != 0 || m.n2 != 0).then_some(1.0)
        });
        let parts = leray_decompose(&grad(&psi).unwrap()).unwrap();
        assert!(parts.solenoidal.norm() < 1e-12 * psi.norm());
        assert!(max_diff(&parts.potential, &psi) < 1e-12);

        let rot = VectorField::new([
            diff(&psi, Axis::X2).unwrap().scaled(-1.0),
            diff(&psi, Axis::X1).unwrap(),
            ScalarField::zeros(&g, Parity::Odd),
        ]);
        let parts = leray_decompose(&rot).unwrap();
        assert!(parts.potential.max_abs() < 1e-14);
    }

    #[test]
    fn leray_round_trip_and_idempotence() {
        let g = grid();
        let u = random_vector(&g, 4);
        let parts = leray_decompose(&u).unwrap();
        let back = parts.solenoidal.add(&parts.gradient().unwrap()).unwrap();
        assert!(back.sub(&u).unwrap().norm() / u.norm() < 1e-13);
        assert!(div(&parts.solenoidal).unwrap().norm() < 1e-12 * u.norm());
        assert_eq!(parts.potential.coeffs().unwrap()[0], ZERO);
        let again = leray_decompose(&parts.solenoidal).unwrap();
        assert!(again.solenoidal.sub(&parts.solenoidal).unwrap().norm() < 1e-13 * u.norm());
    }

    #[test]
    fn projector_algebra() {
        let g = grid();
        let u = random_vector(&g, 5);
        let p = project_solenoidal(&u).unwrap();
        let q = project_gradient(&u).unwrap();
        let n = u.norm();
        assert!(project_solenoidal(&p).unwrap().sub(&p).unwrap().norm() < 1e-13 * n);
        assert!(project_gradient(&q).unwrap().sub(&q).unwrap().norm() < 1e-13 * n);
        assert!(project_gradient(&p).unwrap().norm() < 1e-13 * n);
        assert!(p.add(&q).unwrap().sub(&u).unwrap().norm() < 1e-13 * n);
        assert!(p.inner(&q).unwrap().norm() < 1e-13 * n * n);
    }

    #[test]
    fn vertical_average_rules() {
        let g = grid();
        let flat = ScalarField::from_fn(&g, Parity::Even, |x, y, _| x.sin() + (2.0 * y).cos()).to_spectral();
        assert!(max_diff(&vertical_average(&flat).unwrap(), &flat) < 1e-14);
        let wavy = ScalarField::from_fn(&g, Parity::Even, |x, _, z| x.cos() * (2.0 * PI * z).cos()).to_spectral();
        assert!(vertical_average(&wavy).unwrap().max_abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let odd = ScalarField::random(&g, Parity::Odd, &mut rng, |_| Some(1.0));
        assert_eq!(vertical_average(&odd).unwrap().max_abs(), 0.0);
        assert!(oscillation(&flat).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn vertical_average_matches_quadrature() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let avg = vertical_average(&f).unwrap().to_physical();
        let s = f.to_physical();
        let (s, a) = (s.samples().unwrap(), avg.samples().unwrap());
        let n_z = g.n_z();
        for col in 0..g.n_h() * g.n_h() {
            // Periodic trapezoid over x3 is the plain sample mean.
            let q: f64 = s[col * n_z..(col + 1) * n_z].iter().sum::<f64>() / n_z as f64;
            assert!((q - a[col * n_z]).abs() < 1e-12);
        }
    }

    #[test]
    fn antiderivative_of_sine() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Odd, |_, _, z| (2.0 * PI * z).sin()).to_spectral();
        let i = vertical_antiderivative(&f).unwrap();
        let want = ScalarField::from_fn(&g, Parity::Even, |_, _, z| -(2.0 * PI * z).cos() / (2.0 * PI)).to_spectral();
        assert!(max_diff(&i, &want) < 1e-14);
    }

    #[test]
    fn antiderivative_inverts_derivative_on_oscillation() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let osc = oscillation(&f).unwrap();
        let i = vertical_antiderivative(&osc).unwrap();
        assert!(max_diff(&diff(&i, Axis::X3).unwrap(), &osc) < 1e-13);
        assert!(vertical_average(&i).unwrap().max_abs() == 0.0);
        assert!(max_diff(&osc.add(&vertical_average(&f).unwrap()).unwrap(), &f) < 1e-14);
        assert!(matches!(
            vertical_antiderivative(&f),
            Err(Error::NonzeroVerticalMean(_))
        ));
    }

    #[test]
    fn vorticity_rules() {
        let g = grid();
        let u = random_vector(&g, 10);
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            let a = vorticity_component(&u, i, j).unwrap();
            let b = vorticity_component(&u, j, i).unwrap();
            assert!(a.add(&b).unwrap().max_abs() < 1e-13 * a.max_abs().max(1.0));
        }
        assert!(matches!(vorticity_component(&u, 2, 2), Err(Error::SameAxes(2))));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let gp = grad(&psi).unwrap();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            assert!(vorticity_component(&gp, i, j).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn vorticity_single_mode() {
        // u = (-sin(x2), sin(x1), 0): omega_12 = cos(x1) + cos(x2).
        let g = grid();
        let u = VectorField::new([
            ScalarField::from_fn(&g, Parity::Even, |_, y, _| -y.sin()).to_spectral(),
            ScalarField::from_fn(&g, Parity::Even, |x, _, _| x.sin()).to_spectral(),
            ScalarField::zeros(&g, Parity::Odd),
        ]);
        let w = vorticity_component(&u, 1, 2).unwrap();
        let c = w.coeffs().unwrap();
        for (idx, z) in c.iter().enumerate() {
            let m = g.mode(idx);
            let hit = m.k == 0 && ((m.n1.abs() == 1 && m.n2 == 0) || (m.n1 == 0 && m.n2.abs() == 1));
            let want = if hit { 0.5 } else { 0.0 };
            assert!((z - Complex64::new(want, 0.0)).norm() < 1e-14, "{m:?}");
        }
    }

    #[test]
    fn dealias_mask() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let d = dealias(&f).unwrap();
        assert!(max_diff(&dealias(&d).unwrap(), &d) == 0.0);
        for (idx, z) in d.coeffs().unwrap().iter().enumerate() {
            let m = g.mode(idx);
            if m.n1.abs() > g.keep_h() || m.n2.abs() > g.keep_h() || m.k > g.keep_v() {
                assert_eq!(*z, ZERO);
            }
        }
        let mut raw = f.coeffs().unwrap().to_vec();
        dealias_in_place(&g, &mut raw);
        assert_eq!(raw, d.coeffs().unwrap());
    }

    #[test]
    fn slice_and_extend() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let h = horizontal_slice(&f).unwrap();
        assert!(h.grid().is_horizontal());
        let back = extend_vertically(&h, &g).unwrap();
        assert_eq!(max_diff(&back, &vertical_average(&f).unwrap()), 0.0);
        assert!((h.norm_sq() - back.norm_sq()).abs() < 1e-12 * h.norm_sq());
        let physical = h.to_physical();
        let sample = physical.samples().unwrap()[3 * 16 + 5];
        let full = back.to_physical();
        assert!((full.samples().unwrap()[(3 * 16 + 5) * g.n_z() + 2] - sample).abs() < 1e-13);
        assert!(horizontal_slice(&ScalarField::zeros(&g, Parity::Odd)).is_err());
    }
}
