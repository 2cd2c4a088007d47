use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::par;
use crate::spectral::Parity;

/// Periodic discretization of the slab `[0, L_h)^2 x T^1`.
///
/// Horizontal directions use complex Fourier modes `exp(i xi . x_h)` with
/// `xi = 2 pi n / L_h`. The vertical direction uses a cosine series for even
/// quantities and a sine series for odd ones, `cos(2 pi k x3)` / `sin(2 pi k x3)`
/// with `0 <= k < N_v`. Physical samples live on the full vertical torus with
/// `N_z = 2 N_v` points (a single plane when `N_v = 1`).
///
/// Coefficient layout: `((ix * N_h) + iy) * N_v + k`, `ix`, `iy` in FFT order.
/// Physical layout: `((ix * N_h) + iy) * N_z + iz`.
pub struct Grid {
    l_h: f64,
    n_h: usize,
    n_v: usize,
    n_z: usize,
    dealias_fraction: f64,
    index: Vec<i64>,
    xi: Vec<f64>,
    kappa: Vec<f64>,
    keep_h: i64,
    keep_v: usize,
    fft_h: Arc<dyn Fft<f64>>,
    ifft_h: Arc<dyn Fft<f64>>,
    fft_z: Arc<dyn Fft<f64>>,
    ifft_z: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("l_h", &self.l_h)
            .field("n_h", &self.n_h)
            .field("n_v", &self.n_v)
            .field("dealias_fraction", &self.dealias_fraction)
            .finish()
    }
}

/// Wavenumbers of one coefficient slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub n1: i64,
    pub n2: i64,
    pub k: usize,
    pub xi1: f64,
    pub xi2: f64,
    pub kappa: f64,
}

impl Mode {
    pub fn xi_h_sq(&self) -> f64 {
        self.xi1 * self.xi1 + self.xi2 * self.xi2
    }

    pub fn xi_h(&self) -> f64 {
        self.xi_h_sq().sqrt()
    }

    /// `|xi_h|^2 + kappa^2`, the symbol of `-Laplacian`.
    pub fn total_sq(&self) -> f64 {
        self.xi_h_sq() + self.kappa * self.kappa
    }
}

impl Grid {
    /// Builds a slab grid. Requires even `n_h >= 8`, `n_v >= 4`, `l_h > 0` and a
    /// dealiasing fraction in `(0, 1]`.
    pub fn new(l_h: f64, n_h: usize, n_v: usize, dealias_fraction: f64) -> Result<Arc<Grid>> {
        if n_v < 4 {
            return Err(Error::InvalidGrid(format!("N_v = {n_v} must be >= 4")));
        }
        Self::build(l_h, n_h, n_v, dealias_fraction)
    }

    /// Grid for purely horizontal fields (`N_v = 1`, one vertical sample).
    pub fn horizontal(l_h: f64, n_h: usize, dealias_fraction: f64) -> Result<Arc<Grid>> {
        Self::build(l_h, n_h, 1, dealias_fraction)
    }

    fn build(l_h: f64, n_h: usize, n_v: usize, dealias_fraction: f64) -> Result<Arc<Grid>> {
        if !(l_h.is_finite() && l_h > 0.0) {
            return Err(Error::InvalidGrid(format!("L_h = {l_h} must be positive")));
        }
        if !n_h.is_multiple_of(2) || n_h < 8 {
            return Err(Error::InvalidGrid(format!("N_h = {n_h} must be even and >= 8")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction {dealias_fraction} outside (0, 1]"
            )));
        }
        let n_z = if n_v == 1 { 1 } else { 2 * n_v };
        let half = (n_h / 2) as i64;
        let index: Vec<i64> = (0..n_h as i64)
            .map(|i| if i < half { i } else { i - n_h as i64 })
            .collect();
        let xi = index
            .iter()
            .map(|&n| if n == -half { 0.0 } else { 2.0 * PI * n as f64 / l_h })
            .collect();
        let kappa = (0..n_v).map(|k| 2.0 * PI * k as f64).collect();
        // Small guard so that fractions like 2/3 are not lost to rounding.
        let keep_h = ((n_h as f64 / 2.0) * dealias_fraction + 1e-9).floor() as i64;
        let keep_v = if n_v == 1 {
            0
        } else {
            ((n_z as f64 / 2.0) * dealias_fraction + 1e-9).floor() as usize
        };
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            l_h,
            n_h,
            n_v,
            n_z,
            dealias_fraction,
            index,
            xi,
            kappa,
            keep_h: keep_h.min(half - 1),
            keep_v: keep_v.min(n_v - 1),
            fft_h: planner.plan_fft_forward(n_h),
            ifft_h: planner.plan_fft_inverse(n_h),
            fft_z: planner.plan_fft_forward(n_z),
            ifft_z: planner.plan_fft_inverse(n_z),
        }))
    }

    /// The horizontal grid with the same box and resolution.
    pub fn horizontal_grid(&self) -> Arc<Grid> {
        Grid::build(self.l_h, self.n_h, 1, self.dealias_fraction).expect("validated parameters")
    }

    pub fn l_h(&self) -> f64 {
        self.l_h
    }
    pub fn n_h(&self) -> usize {
        self.n_h
    }
    pub fn n_v(&self) -> usize {
        self.n_v
    }
    pub fn n_z(&self) -> usize {
        self.n_z
    }
    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }
    pub fn is_horizontal(&self) -> bool {
        self.n_v == 1
    }

    /// Largest retained horizontal mode index after dealiasing.
    pub fn keep_h(&self) -> i64 {
        self.keep_h
    }
    /// Largest retained vertical mode index after dealiasing.
    pub fn keep_v(&self) -> usize {
        self.keep_v
    }

    pub fn n_spec(&self) -> usize {
        self.n_h * self.n_h * self.n_v
    }
    pub fn n_phys(&self) -> usize {
        self.n_h * self.n_h * self.n_z
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.l_h == other.l_h
            && self.n_h == other.n_h
            && self.n_v == other.n_v
            && self.dealias_fraction == other.dealias_fraction
    }

    #[inline]
    pub fn spec_index(&self, ix: usize, iy: usize, k: usize) -> usize {
        (ix * self.n_h + iy) * self.n_v + k
    }

    #[inline]
    pub fn spec_coords(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.n_v;
        let col = idx / self.n_v;
        (col / self.n_h, col % self.n_h, k)
    }

    /// Signed mode index for FFT position `i`.
    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        self.index[i]
    }

    /// FFT position of the signed horizontal index `n`.
    #[inline]
    pub fn position(&self, n: i64) -> usize {
        n.rem_euclid(self.n_h as i64) as usize
    }

    #[inline]
    pub fn xi(&self, i: usize) -> f64 {
        self.xi[i]
    }

    #[inline]
    pub fn kappa(&self, k: usize) -> f64 {
        self.kappa[k]
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n_h / 2
    }

    pub fn mode(&self, idx: usize) -> Mode {
        let (ix, iy, k) = self.spec_coords(idx);
        Mode {
            n1: self.index[ix],
            n2: self.index[iy],
            k,
            xi1: self.xi[ix],
            xi2: self.xi[iy],
            kappa: self.kappa[k],
        }
    }

    /// Whether a coefficient slot can carry content for the given parity.
    #[inline]
    pub fn is_valid(&self, ix: usize, iy: usize, k: usize, parity: Parity) -> bool {
        !self.is_nyquist(ix) && !self.is_nyquist(iy) && !(parity == Parity::Odd && k == 0)
    }

    /// Whether a slot survives the dealiasing mask.
    #[inline]
    pub fn is_retained(&self, ix: usize, iy: usize, k: usize) -> bool {
        self.index[ix].abs() <= self.keep_h && self.index[iy].abs() <= self.keep_h && k <= self.keep_v
    }

    /// Quadrature weight of vertical mode `k`: `int_0^1 cos^2 = 1/2` for `k >= 1`.
    #[inline]
    pub fn vertical_weight(k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            0.5
        }
    }

    /// Volume of the periodic box (vertical extent is 1).
    pub fn volume(&self) -> f64 {
        self.l_h * self.l_h
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.n_phys() as f64
    }

    pub fn dx_h(&self) -> f64 {
        self.l_h / self.n_h as f64
    }

    pub fn x_h(&self, i: usize) -> f64 {
        self.l_h * i as f64 / self.n_h as f64
    }

    pub fn x3(&self, iz: usize) -> f64 {
        iz as f64 / self.n_z as f64
    }

    /// Smallest grid spacing, used by the CFL check.
    pub fn min_spacing(&self) -> f64 {
        if self.n_z > 1 {
            self.dx_h().min(1.0 / self.n_z as f64)
        } else {
            self.dx_h()
        }
    }

    /// In-place 3D FFT of a full complex array (unnormalized both ways).
    pub(crate) fn fft3(&self, buf: &mut [Complex64], inverse: bool) {
        let (n_h, n_z) = (self.n_h, self.n_z);
        debug_assert_eq!(buf.len(), n_h * n_h * n_z);
        if n_z > 1 {
            let plan = if inverse { &self.ifft_z } else { &self.fft_z };
            par::for_each_chunk_mut(buf, n_h * n_z, |_, block| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(block, &mut scratch);
            });
        }
        let plan = if inverse { &self.ifft_h } else { &self.fft_h };
        // y: each ix block is an (n_h x n_z) matrix.
        par::for_each_chunk_mut(buf, n_h * n_z, |_, block| {
            let mut t = vec![Complex64::new(0.0, 0.0); n_h * n_z];
            transpose(block, &mut t, n_h, n_z);
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(&mut t, &mut scratch);
            transpose(&t, block, n_z, n_h);
        });
        // x: the whole array is an (n_h x n_h*n_z) matrix.
        let cols = n_h * n_z;
        let mut t = vec![Complex64::new(0.0, 0.0); buf.len()];
        {
            let src: &[Complex64] = buf;
            par::for_each_chunk_mut(&mut t, n_h * 64, |c, chunk| {
                for (r, line) in chunk.chunks_mut(n_h).enumerate() {
                    let col = c * 64 + r;
                    for (ix, v) in line.iter_mut().enumerate() {
                        *v = src[ix * cols + col];
                    }
                }
            });
        }
        par::for_each_chunk_mut(&mut t, n_h * 64, |_, chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(chunk, &mut scratch);
        });
        par::for_each_chunk_mut(buf, cols, |ix, row| {
            for (col, v) in row.iter_mut().enumerate() {
                *v = t[col * n_h + ix];
            }
        });
    }

    /// Adds `scale * f_hat` of the spectral field into the full FFT array.
    pub(crate) fn scatter(&self, coeffs: &[Complex64], parity: Parity, scale: Complex64, out: &mut [Complex64]) {
        let (n_h, n_v, n_z) = (self.n_h, self.n_v, self.n_z);
        let half = Complex64::new(0.5, 0.0) * scale;
        let minus_i_half = Complex64::new(0.0, -0.5) * scale;
        par::for_each_chunk_mut(out, n_h * n_z, |ix, block| {
            if self.is_nyquist(ix) {
                return;
            }
            for iy in 0..n_h {
                if self.is_nyquist(iy) {
                    continue;
                }
                let src = &coeffs[(ix * n_h + iy) * n_v..(ix * n_h + iy + 1) * n_v];
                let line = &mut block[iy * n_z..(iy + 1) * n_z];
                match parity {
                    Parity::Even => {
                        line[0] += src[0] * scale;
                        for k in 1..n_v {
                            let c = src[k] * half;
                            line[k] += c;
                            line[n_z - k] += c;
                        }
                    }
                    Parity::Odd => {
                        for k in 1..n_v {
                            let c = src[k] * minus_i_half;
                            line[k] += c;
                            line[n_z - k] -= c;
                        }
                    }
                }
            }
        });
    }

    /// Extracts parity coefficients from a normalized full spectrum.
    pub(crate) fn gather(&self, full: &[Complex64], parity: Parity) -> Vec<Complex64> {
        let (n_h, n_v, n_z) = (self.n_h, self.n_v, self.n_z);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_spec()];
        let i = Complex64::new(0.0, 1.0);
        par::for_each_chunk_mut(&mut out, n_h * n_v, |ix, block| {
            if self.is_nyquist(ix) {
                return;
            }
            for iy in 0..n_h {
                if self.is_nyquist(iy) {
                    continue;
                }
                let line = &full[(ix * n_h + iy) * n_z..(ix * n_h + iy + 1) * n_z];
                let dst = &mut block[iy * n_v..(iy + 1) * n_v];
                match parity {
                    Parity::Even => {
                        dst[0] = line[0];
                        for k in 1..n_v {
                            dst[k] = line[k] + line[n_z - k];
                        }
                    }
                    Parity::Odd => {
                        for k in 1..n_v {
                            dst[k] = i * (line[k] - line[n_z - k]);
                        }
                    }
                }
            }
        });
        out
    }

    /// Physical samples of one or two spectral fields (two are packed into a
    /// single complex transform).
    pub(crate) fn inverse_pair(
        &self,
        a: (&[Complex64], Parity),
        b: Option<(&[Complex64], Parity)>,
    ) -> (Vec<f64>, Option<Vec<f64>>) {
        let mut full = vec![Complex64::new(0.0, 0.0); self.n_phys()];
        self.scatter(a.0, a.1, Complex64::new(1.0, 0.0), &mut full);
        if let Some((cb, pb)) = b {
            self.scatter(cb, pb, Complex64::new(0.0, 1.0), &mut full);
        }
        self.fft3(&mut full, true);
        let re = full.iter().map(|z| z.re).collect();
        let im = b.map(|_| full.iter().map(|z| z.im).collect());
        (re, im)
    }

    /// Parity coefficients of one or two real sample arrays.
    pub(crate) fn forward_pair(
        &self,
        a: (&[f64], Parity),
        b: Option<(&[f64], Parity)>,
    ) -> (Vec<Complex64>, Option<Vec<Complex64>>) {
        let n = self.n_phys();
        let mut full: Vec<Complex64> = match b {
            Some((sb, _)) => a.0.iter().zip(sb).map(|(&x, &y)| Complex64::new(x, y)).collect(),
            None => a.0.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        };
        self.fft3(&mut full, false);
        let norm = 1.0 / n as f64;
        match b {
            None => {
                full.iter_mut().for_each(|z| *z *= norm);
                (self.gather(&full, a.1), None)
            }
            Some((_, pb)) => {
                let (n_h, n_z) = (self.n_h, self.n_z);
                let mut fa = vec![Complex64::new(0.0, 0.0); n];
                let mut fb = vec![Complex64::new(0.0, 0.0); n];
                for ix in 0..n_h {
                    let mx = (n_h - ix) % n_h;
                    for iy in 0..n_h {
                        let my = (n_h - iy) % n_h;
                        for iz in 0..n_z {
                            let mz = (n_z - iz) % n_z;
                            let z = full[(ix * n_h + iy) * n_z + iz];
                            let zm = full[(mx * n_h + my) * n_z + mz].conj();
                            let idx = (ix * n_h + iy) * n_z + iz;
                            fa[idx] = (z + zm) * (0.5 * norm);
                            fb[idx] = (z - zm) * Complex64::new(0.0, -0.5 * norm);
                        }
                    }
                }
                (self.gather(&fa, a.1), Some(self.gather(&fb, pb)))
            }
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dealias_band_for_32_points() {
        let g = Grid::new(2.0 * PI, 32, 8, 2.0 / 3.0).unwrap();
        assert_eq!(g.keep_h(), 10);
        assert_eq!(g.keep_v(), 5);
    }

    #[test]
    fn no_mask_at_fraction_one() {
        let g = Grid::new(1.0, 8, 4, 1.0).unwrap();
        // Everything except the (always empty) Nyquist slots is retained.
        for ix in 0..8 {
            for iy in 0..8 {
                for k in 0..4 {
                    if !g.is_nyquist(ix) && !g.is_nyquist(iy) {
                        assert!(g.is_retained(ix, iy, k));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(2.0 * PI, 7, 8, 2.0 / 3.0).is_err());
        assert!(Grid::new(2.0 * PI, 6, 8, 2.0 / 3.0).is_err());
        assert!(Grid::new(0.0, 8, 8, 2.0 / 3.0).is_err());
        assert!(Grid::new(-1.0, 8, 8, 2.0 / 3.0).is_err());
        assert!(Grid::new(1.0, 8, 3, 2.0 / 3.0).is_err());
        assert!(Grid::new(1.0, 8, 4, 0.0).is_err());
    }

    #[test]
    fn wavenumber_tables() {
        let g = Grid::new(4.0 * PI, 16, 4, 1.0).unwrap();
        assert_eq!(g.signed(15), -1);
        assert!((g.xi(1) - 0.5).abs() < 1e-15);
        assert!((g.kappa(2) - 4.0 * PI).abs() < 1e-15);
        assert_eq!(g.xi(8), 0.0);
        let idx = g.spec_index(3, 5, 2);
        assert_eq!(g.spec_coords(idx), (3, 5, 2));
    }
}
