use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harness::config::{IcKind, StudyConfig};
use crate::solver::ACState;
use crate::spectral::ops::{self, Axis};
use crate::spectral::{Grid, Mode, Parity, ScalarField, VectorField};

/// Slab grid described by the config.
pub fn study_grid(cfg: &StudyConfig) -> Result<Arc<Grid>> {
    Grid::new(cfg.l_h, cfg.n_h, cfg.n_v, cfg.dealias)
}

fn in_band(cfg: &StudyConfig, g: &Grid, m: &Mode, horizontal: bool) -> bool {
    let nb = (cfg.ic_band as i64).min(g.keep_h());
    if m.n1.abs() > nb || m.n2.abs() > nb || (m.n1, m.n2, m.k) == (0, 0, 0) {
        return false;
    }
    if horizontal {
        m.k == 0
    } else {
        m.k >= cfg.ic_k_min && m.k <= cfg.ic_band_v.min(g.keep_v())
    }
}

fn spectral_weight(cfg: &StudyConfig, m: &Mode) -> f64 {
    let r2 = (m.n1 * m.n1 + m.n2 * m.n2) as f64 + (m.k * m.k) as f64;
    (1.0 + r2).powf(-0.5 * cfg.ic_spectral_slope)
}

fn draw(cfg: &StudyConfig, g: &Arc<Grid>, parity: Parity, horizontal: bool, rng: &mut ChaCha8Rng) -> ScalarField {
    ScalarField::random(g, parity, rng, |m| {
        in_band(cfg, g, m, horizontal).then(|| spectral_weight(cfg, m))
    })
}

/// Multiplies by the localization envelope, then cuts back to the band.
fn localize(cfg: &StudyConfig, f: &ScalarField, horizontal: bool) -> Result<ScalarField> {
    let g = f.grid().clone();
    let f = if cfg.ic_envelope > 0.0 {
        let sigma = cfg.ic_envelope * g.l_h();
        let c = 0.5 * g.l_h();
        let phys = f.to_physical();
        let s = phys.samples()?;
        let n_z = g.n_z();
        let out: Vec<f64> = s
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let col = i / n_z;
                let (x, y) = (g.x_h(col / g.n_h()), g.x_h(col % g.n_h()));
                let r2 = (x - c).powi(2) + (y - c).powi(2);
                v * (-0.5 * r2 / (sigma * sigma)).exp()
            })
            .collect();
        ScalarField::from_samples(&g, f.parity(), out).to_spectral()
    } else {
        f.to_spectral()
    };
    f.map_modes(
        f.parity(),
        |m, c| if in_band(cfg, &g, m, horizontal) { c } else { c * 0.0 },
    )
}

fn normalized(f: VectorField, amp: f64, what: &str) -> Result<VectorField> {
    let n = f.norm();
    if !(n > 0.0) {
        return Err(Error::config("ic_band", format!("empty band for the {what} part")));
    }
    Ok(f.scaled(amp / n))
}

fn curl(a: &VectorField) -> Result<VectorField> {
    Ok(VectorField::new([
        ops::vorticity_component(a, 2, 3)?,
        ops::vorticity_component(a, 3, 1)?,
        ops::vorticity_component(a, 1, 2)?,
    ]))
}

/// `(-d2 f, d1 f, 0)`.
fn perp_grad(f: &ScalarField) -> Result<VectorField> {
    Ok(VectorField::new([
        ops::diff(f, Axis::X2)?.scaled(-1.0),
        ops::diff(f, Axis::X1)?,
        ScalarField::zeros(f.grid(), Parity::Odd),
    ]))
}

/// Seeded, band-limited initial data.
///
/// `well`: x3-independent. For `beta = 1/2` the state `(grad_perp pi, pi)`
/// spanning the kernel, otherwise `(grad_perp psi, 0)` with `p = 0`. The
/// whole state has L2 norm `ic_amplitude`.
///
/// `ill`: independent solenoidal part `curl A`, gradient part `grad psi` and
/// pressure, each with L2 norm `ic_amplitude`; vertical modes
/// `ic_k_min..=ic_band_v`.
pub fn gen_initial_data(cfg: &StudyConfig, grid: &Arc<Grid>) -> Result<ACState> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.ic_seed);
    let amp = cfg.ic_amplitude;
    match cfg.ic_kind {
        IcKind::Well => {
            let psi = localize(cfg, &draw(cfg, grid, Parity::Even, true, &mut rng), true)?;
            let u = perp_grad(&psi)?;
            let (u, p) = if cfg.beta == 0.5 {
                (u, psi)
            } else {
                (u, ScalarField::zeros(grid, Parity::Even))
            };
            let s = ACState::new(u, p, 0.0)?;
            let n = s.norm();
            if !(n > 0.0) {
                return Err(Error::config("ic_band", "empty band"));
            }
            s.lin_comb(amp / n, &s, 0.0)
        }
        IcKind::Ill => {
            let a = VectorField::new([
                localize(cfg, &draw(cfg, grid, Parity::Odd, false, &mut rng), false)?,
                localize(cfg, &draw(cfg, grid, Parity::Odd, false, &mut rng), false)?,
                localize(cfg, &draw(cfg, grid, Parity::Even, false, &mut rng), false)?,
            ]);
            let sol = normalized(curl(&a)?, amp, "solenoidal")?;
            let psi = localize(cfg, &draw(cfg, grid, Parity::Even, false, &mut rng), false)?;
            let grad = normalized(ops::grad(&psi)?, amp, "gradient")?;
            let p = localize(cfg, &draw(cfg, grid, Parity::Even, false, &mut rng), false)?;
            let pn = p.norm();
            if !(pn > 0.0) {
                return Err(Error::config("ic_band", "empty band for the pressure"));
            }
            ACState::new(sol.add(&grad)?, p.scaled(amp / pn), 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic::{complement_project, kernel_project};

    fn small(kind: IcKind, beta: f64) -> StudyConfig {
        StudyConfig {
            n_h: 16,
            n_v: 4,
            ic_band: 4,
            ic_kind: kind,
            beta,
            ..StudyConfig::default()
        }
    }

    #[test]
    fn well_prepared_half_is_in_the_kernel() {
        let mut cfg = small(IcKind::Well, 0.5);
        cfg.ic_envelope = 0.15;
        let g = study_grid(&cfg).unwrap();
        let s = gen_initial_data(&cfg, &g).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(complement_project(&s).norm() <= 1e-13 * s.norm());
        assert!(kernel_project(&s).sub(&s).unwrap().norm() <= 1e-13);
    }

    #[test]
    fn well_prepared_ge1_is_solenoidal_and_flat() {
        let cfg = small(IcKind::Well, 1.0);
        let g = study_grid(&cfg).unwrap();
        let s = gen_initial_data(&cfg, &g).unwrap();
        assert_eq!(s.p.norm(), 0.0);
        assert!(ops::div(&s.u).unwrap().norm() < 1e-13);
        assert!(ops::oscillation(&s.u.comps[0]).unwrap().norm() == 0.0);
    }

    #[test]
    fn ill_prepared_has_every_part() {
        let cfg = small(IcKind::Ill, 1.0);
        let g = study_grid(&cfg).unwrap();
        let s = gen_initial_data(&cfg, &g).unwrap();
        let parts = ops::leray_decompose(&s.u).unwrap();
        assert!((parts.gradient().unwrap().norm() - 1.0).abs() < 1e-12);
        assert!((parts.solenoidal.norm() - 1.0).abs() < 1e-12);
        assert!((s.p.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_vertical_band() {
        let mut cfg = small(IcKind::Ill, 0.5);
        cfg.ic_k_min = 1;
        cfg.ic_envelope = 0.1;
        let g = study_grid(&cfg).unwrap();
        let s = gen_initial_data(&cfg, &g).unwrap();
        for c in s.u.comps.iter().chain([&s.p]) {
            assert_eq!(ops::vertical_average(c).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn same_seed_same_bits() {
        let mut cfg = small(IcKind::Ill, 1.0);
        cfg.ic_envelope = 0.2;
        let g = study_grid(&cfg).unwrap();
        let a = gen_initial_data(&cfg, &g).unwrap();
        let b = gen_initial_data(&cfg, &g).unwrap();
        let bits = |s: &ACState| -> Vec<u64> {
            s.mode_vectors()
                .iter()
                .flatten()
                .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        cfg.ic_seed = 2;
        assert_ne!(bits(&a), bits(&gen_initial_data(&cfg, &g).unwrap()));
    }

    #[test]
    fn empty_band_is_an_error() {
        let mut cfg = small(IcKind::Ill, 1.0);
        cfg.ic_band = 0;
        cfg.ic_band_v = 0;
        let g = study_grid(&cfg).unwrap();
        assert!(matches!(gen_initial_data(&cfg, &g), Err(Error::Config { .. })));
    }
}
