use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{Grid, Mode};

/// Symmetry of a quantity under `x3 -> -x3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    pub fn parse(s: &str) -> Option<Parity> {
        match s {
            "even" => Some(Parity::Even),
            "odd" => Some(Parity::Odd),
            _ => None,
        }
    }
}

/// Parities of a velocity field: horizontal components even, vertical odd.
pub const VELOCITY_PARITY: [Parity; 3] = [Parity::Even, Parity::Even, Parity::Odd];

#[derive(Clone, Debug)]
pub enum Values {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// A real scalar on the slab, stored as samples or as parity coefficients.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<Grid>,
    parity: Parity,
    values: Values,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>, parity: Parity) -> Self {
        let n = grid.n_spec();
        Self {
            grid: grid.clone(),
            parity,
            values: Values::Spectral(vec![Complex64::new(0.0, 0.0); n]),
        }
    }

    /// Wraps coefficients. Slots that cannot carry content for this parity
    /// (Nyquist, `k = 0` of a sine series) are cleared.
    pub fn from_coeffs(grid: &Arc<Grid>, parity: Parity, mut coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.n_spec(), "coefficient count");
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let (ix, iy, k) = grid.spec_coords(idx);
            if !grid.is_valid(ix, iy, k, parity) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        Self {
            grid: grid.clone(),
            parity,
            values: Values::Spectral(coeffs),
        }
    }

    pub fn from_samples(grid: &Arc<Grid>, parity: Parity, samples: Vec<f64>) -> Self {
        assert_eq!(samples.len(), grid.n_phys(), "sample count");
        Self {
            grid: grid.clone(),
            parity,
            values: Values::Physical(samples),
        }
    }

    /// Samples `f(x1, x2, x3)` on the physical grid.
    pub fn from_fn(grid: &Arc<Grid>, parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let (n_h, n_z) = (grid.n_h(), grid.n_z());
        let mut samples = Vec::with_capacity(grid.n_phys());
        for ix in 0..n_h {
            for iy in 0..n_h {
                for iz in 0..n_z {
                    samples.push(f(grid.x_h(ix), grid.x_h(iy), grid.x3(iz)));
                }
            }
        }
        Self::from_samples(grid, parity, samples)
    }

    /// Random coefficients with real-field symmetry on modes accepted by `filter`.
    pub fn random<R: Rng>(
        grid: &Arc<Grid>,
        parity: Parity,
        rng: &mut R,
        filter: impl Fn(&Mode) -> Option<f64>,
    ) -> Self {
        let n_h = grid.n_h();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n_spec()];
        for idx in 0..grid.n_spec() {
            let (ix, iy, k) = grid.spec_coords(idx);
            if !grid.is_valid(ix, iy, k, parity) {
                continue;
            }
            let m = grid.mode(idx);
            // Only draw for the canonical half; the mirror gets the conjugate.
            let canonical = m.n1 > 0 || (m.n1 == 0 && m.n2 >= 0);
            if !canonical {
                continue;
            }
            let Some(amp) = filter(&m) else { continue };
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let c = if m.n1 == 0 && m.n2 == 0 {
                Complex64::new(re * amp, 0.0)
            } else {
                Complex64::new(re, im) * (amp / std::f64::consts::SQRT_2)
            };
            coeffs[idx] = c;
            let mirror = grid.spec_index((n_h - ix) % n_h, (n_h - iy) % n_h, k);
            if mirror != idx {
                coeffs[mirror] = c.conj();
            }
        }
        Self::from_coeffs(grid, parity, coeffs)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.values, Values::Spectral(_))
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn coeffs(&self) -> Result<&[Complex64]> {
        match &self.values {
            Values::Spectral(c) => Ok(c),
            Values::Physical(_) => Err(Error::Representation { expected: "spectral" }),
        }
    }

    pub fn coeffs_mut(&mut self) -> Result<&mut [Complex64]> {
        match &mut self.values {
            Values::Spectral(c) => Ok(c),
            Values::Physical(_) => Err(Error::Representation { expected: "spectral" }),
        }
    }

    pub fn samples(&self) -> Result<&[f64]> {
        match &self.values {
            Values::Physical(s) => Ok(s),
            Values::Spectral(_) => Err(Error::Representation { expected: "physical" }),
        }
    }

    pub fn into_coeffs(self) -> Result<Vec<Complex64>> {
        match self.values {
            Values::Spectral(c) => Ok(c),
            Values::Physical(_) => Err(Error::Representation { expected: "spectral" }),
        }
    }

    /// Physical samples to coefficients. Content of the wrong parity is
    /// projected out.
    pub fn forward(&self) -> Result<ScalarField> {
        let s = self.samples()?;
        let (c, _) = self.grid.forward_pair((s, self.parity), None);
        Ok(Self {
            grid: self.grid.clone(),
            parity: self.parity,
            values: Values::Spectral(c),
        })
    }

    /// Coefficients to physical samples.
    pub fn inverse(&self) -> Result<ScalarField> {
        let c = self.coeffs()?;
        let (s, _) = self.grid.inverse_pair((c, self.parity), None);
        Ok(Self {
            grid: self.grid.clone(),
            parity: self.parity,
            values: Values::Physical(s),
        })
    }

    /// Coefficient form, transforming if needed.
    pub fn to_spectral(&self) -> ScalarField {
        if self.is_spectral() {
            self.clone()
        } else {
            self.forward().expect("physical field")
        }
    }

    /// Physical form, transforming if needed.
    pub fn to_physical(&self) -> ScalarField {
        if self.is_spectral() {
            self.inverse().expect("spectral field")
        } else {
            self.clone()
        }
    }

    pub fn with_coeffs(&self, parity: Parity, coeffs: Vec<Complex64>) -> ScalarField {
        Self {
            grid: self.grid.clone(),
            parity,
            values: Values::Spectral(coeffs),
        }
    }

    fn check_compatible(&self, other: &ScalarField) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.parity != other.parity {
            return Err(Error::Parity(format!(
                "{} vs {}",
                self.parity.as_str(),
                other.parity.as_str()
            )));
        }
        Ok(())
    }

    /// `a * self + b * other`, both spectral with matching parity.
    pub fn lin_comb(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        self.check_compatible(other)?;
        let x = self.coeffs()?;
        let y = other.coeffs()?;
        let out = x.iter().zip(y).map(|(p, q)| p * a + q * b).collect();
        Ok(self.with_coeffs(self.parity, out))
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        match &self.values {
            Values::Spectral(c) => self.with_coeffs(self.parity, c.iter().map(|z| z * s).collect()),
            Values::Physical(v) => Self {
                grid: self.grid.clone(),
                parity: self.parity,
                values: Values::Physical(v.iter().map(|x| x * s).collect()),
            },
        }
    }

    /// Applies a per-mode multiplier to the coefficients.
    pub fn map_modes(&self, parity: Parity, f: impl Fn(&Mode, Complex64) -> Complex64) -> Result<ScalarField> {
        let c = self.coeffs()?;
        let g = &self.grid;
        let out = c.iter().enumerate().map(|(idx, &z)| f(&g.mode(idx), z)).collect();
        Ok(ScalarField::from_coeffs(g, parity, out))
    }

    /// Squared L2 norm over the box, from either representation.
    pub fn norm_sq(&self) -> f64 {
        match &self.values {
            Values::Physical(s) => {
                self.grid.cell_volume() * par::chunked_sum(s.len(), |r| s[r].iter().map(|x| x * x).sum())
            }
            Values::Spectral(c) => {
                let g = &self.grid;
                let n_v = g.n_v();
                g.volume()
                    * par::chunked_sum(c.len(), |r| {
                        r.map(|i| Grid::vertical_weight(i % n_v) * c[i].norm_sqr()).sum()
                    })
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Complex L2 pairing `int conj(self) * other` of two spectral fields.
    pub fn inner(&self, other: &ScalarField) -> Result<Complex64> {
        self.check_compatible(other)?;
        let x = self.coeffs()?;
        let y = other.coeffs()?;
        let n_v = self.grid.n_v();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (a, b)) in x.iter().zip(y).enumerate() {
            acc += a.conj() * b * Grid::vertical_weight(i % n_v);
        }
        Ok(acc * self.grid.volume())
    }

    /// Largest coefficient (or sample) magnitude.
    pub fn max_abs(&self) -> f64 {
        match &self.values {
            Values::Physical(s) => s.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
            Values::Spectral(c) => c.iter().fold(0.0_f64, |m, z| m.max(z.norm())),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.values {
            Values::Physical(s) => s.iter().all(|x| x.is_finite()),
            Values::Spectral(c) => c.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }
}

/// Three scalar components. Velocity fields use [`VELOCITY_PARITY`].
#[derive(Clone, Debug)]
pub struct VectorField {
    pub comps: [ScalarField; 3],
}

impl VectorField {
    pub fn new(comps: [ScalarField; 3]) -> Self {
        Self { comps }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::new(VELOCITY_PARITY.map(|p| ScalarField::zeros(grid, p)))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.comps[0].grid()
    }

    pub fn parities(&self) -> [Parity; 3] {
        [0, 1, 2].map(|i| self.comps[i].parity())
    }

    pub fn to_spectral(&self) -> VectorField {
        let [a, b, c] = &self.comps;
        VectorField::new([a.to_spectral(), b.to_spectral(), c.to_spectral()])
    }

    pub fn to_physical(&self) -> VectorField {
        let [a, b, c] = &self.comps;
        VectorField::new([a.to_physical(), b.to_physical(), c.to_physical()])
    }

    pub fn lin_comb(&self, a: f64, other: &VectorField, b: f64) -> Result<VectorField> {
        Ok(VectorField::new([
            self.comps[0].lin_comb(a, &other.comps[0], b)?,
            self.comps[1].lin_comb(a, &other.comps[1], b)?,
            self.comps[2].lin_comb(a, &other.comps[2], b)?,
        ]))
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scaled(&self, s: f64) -> VectorField {
        let [a, b, c] = &self.comps;
        VectorField::new([a.scaled(s), b.scaled(s), c.scaled(s)])
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().map(|c| c.norm_sq()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn inner(&self, other: &VectorField) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            acc += self.comps[i].inner(&other.comps[i])?;
        }
        Ok(acc)
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid> {
        Grid::new(2.0 * PI, 16, 8, 2.0 / 3.0).unwrap()
    }

    #[test]
    fn constant_is_zero_mode() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Even, |_, _, _| 2.5).forward().unwrap();
        let c = f.coeffs().unwrap();
        assert!((c[0] - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn cosine_is_single_vertical_mode() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Even, |_, _, z| (2.0 * PI * z).cos())
            .forward()
            .unwrap();
        let c = f.coeffs().unwrap();
        for (i, z) in c.iter().enumerate() {
            let want = if i == 1 { 1.0 } else { 0.0 };
            assert!((z - Complex64::new(want, 0.0)).norm() < 1e-14, "slot {i}");
        }
    }

    #[test]
    fn sine_is_single_odd_mode() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Odd, |x, _, z| x.cos() * (4.0 * PI * z).sin())
            .forward()
            .unwrap();
        let c = f.coeffs().unwrap();
        let a = g.spec_index(1, 0, 2);
        let b = g.spec_index(15, 0, 2);
        assert!((c[a] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((c[b] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let rest: f64 = c
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != a && *i != b)
            .map(|(_, z)| z.norm())
            .sum();
        assert!(rest < 1e-13);
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for parity in [Parity::Even, Parity::Odd] {
            let f = ScalarField::random(&g, parity, &mut rng, |_| Some(1.0));
            let phys = f.inverse().unwrap();
            let back = phys.forward().unwrap();
            let d = back.sub(&f).unwrap().norm() / f.norm();
            assert!(d < 1e-13, "round trip {d}");
            let rel = (phys.norm_sq() - f.norm_sq()).abs() / f.norm_sq();
            assert!(rel < 1e-12, "parseval {rel}");
        }
    }

    #[test]
    fn packed_pair_matches_single_transforms() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let b = ScalarField::random(&g, Parity::Odd, &mut rng, |_| Some(1.0));
        let (sa, sb) = g.inverse_pair(
            (a.coeffs().unwrap(), Parity::Even),
            Some((b.coeffs().unwrap(), Parity::Odd)),
        );
        let sb = sb.unwrap();
        let ra = a.inverse().unwrap();
        let rb = b.inverse().unwrap();
        let da = sa
            .iter()
            .zip(ra.samples().unwrap())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let db = sb
            .iter()
            .zip(rb.samples().unwrap())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(da < 1e-13 && db < 1e-13);
        let (ca, cb) = g.forward_pair((&sa, Parity::Even), Some((&sb, Parity::Odd)));
        let ea = ca
            .iter()
            .zip(a.coeffs().unwrap())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        let eb = cb
            .unwrap()
            .iter()
            .zip(b.coeffs().unwrap())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(ea < 1e-13 && eb < 1e-13);
    }

    #[test]
    fn representation_mismatch_is_an_error() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Even, |x, _, _| x);
        assert!(f.coeffs().is_err());
        assert!(f.inverse().is_err());
        assert!(ScalarField::zeros(&g, Parity::Even).forward().is_err());
    }

    #[test]
    fn random_fields_are_real() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = ScalarField::random(&g, Parity::Even, &mut rng, |_| Some(1.0));
        let mut full = vec![Complex64::new(0.0, 0.0); g.n_phys()];
        g.scatter(f.coeffs().unwrap(), Parity::Even, Complex64::new(1.0, 0.0), &mut full);
        g.fft3(&mut full, true);
        assert!(full.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn mixed_parity_arithmetic_is_rejected() {
        let g = grid();
        let a = ScalarField::zeros(&g, Parity::Even);
        let b = ScalarField::zeros(&g, Parity::Odd);
        assert!(a.add(&b).is_err());
    }
}
