use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, ScalarField};

/// Horizontal square `[c - s/2, c + s/2]^2` times the full vertical torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubBox {
    pub center: [f64; 2],
    pub side: f64,
}

impl SubBox {
    /// Centered box of side `fraction * L_h`, `fraction` in `(0, 1]`.
    pub fn centered(grid: &Grid, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "box fraction {fraction} outside (0, 1]"
            )));
        }
        let l = grid.l_h();
        Ok(Self {
            center: [0.5 * l, 0.5 * l],
            side: fraction * l,
        })
    }

    pub fn diameter(&self) -> f64 {
        self.side * std::f64::consts::SQRT_2
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        let h = 0.5 * self.side + 1e-12;
        (x1 - self.center[0]).abs() <= h && (x2 - self.center[1]).abs() <= h
    }

    /// Per-sample weights (1 inside, 0 outside) on the physical grid.
    pub fn mask(&self, grid: &Grid) -> Vec<f64> {
        let (n_h, n_z) = (grid.n_h(), grid.n_z());
        let mut w = Vec::with_capacity(grid.n_phys());
        for ix in 0..n_h {
            for iy in 0..n_h {
                let inside = if self.contains(grid.x_h(ix), grid.x_h(iy)) {
                    1.0
                } else {
                    0.0
                };
                w.extend(std::iter::repeat_n(inside, n_z));
            }
        }
        w
    }

    /// `int_K f^2` by the grid rule.
    pub fn norm_sq(&self, f: &ScalarField) -> f64 {
        weighted_norm_sq(f, &self.mask(f.grid()))
    }
}

/// `int w f^2` by the grid rule, `w` given per physical sample.
pub fn weighted_norm_sq(f: &ScalarField, w: &[f64]) -> f64 {
    let g = f.grid();
    let s = f.to_physical();
    let s = s.samples().expect("physical field");
    g.cell_volume() * crate::par::chunked_sum(s.len(), |r| r.map(|i| w[i] * s[i] * s[i]).sum())
}
