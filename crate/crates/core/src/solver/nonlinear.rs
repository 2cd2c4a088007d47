use num_complex::Complex64;

use crate::error::Result;
use crate::par;
use crate::spectral::ops::{self, Axis};
use crate::spectral::{ScalarField, VectorField, VELOCITY_PARITY};

/// `N(u) = -(u . grad) u - (div u) u / 2`, evaluated pseudo-spectrally and
/// dealiased. Also returns `max |u|` over the physical grid.
pub fn nonlinear_rhs_with_max(u: &VectorField) -> Result<(VectorField, f64)> {
    let g = u.grid().clone();
    let u = u.to_spectral();
    // Field list: u1 u2 u3, then d_j u_i for i, j in 1..=3.
    let mut spec: Vec<ScalarField> = u.comps.to_vec();
    for i in 0..3 {
        for axis in Axis::ALL {
            spec.push(ops::diff(&u.comps[i], axis)?);
        }
    }
    let mut phys: Vec<Vec<f64>> = Vec::with_capacity(12);
    for pair in spec.chunks(2) {
        let a = (pair[0].coeffs()?, pair[0].parity());
        let b = (pair[1].coeffs()?, pair[1].parity());
        let (sa, sb) = g.inverse_pair(a, Some(b));
        phys.push(sa);
        phys.push(sb.expect("paired transform"));
    }
    let n = g.n_phys();
    let mut out = vec![[0.0f64; 3]; n];
    let (uu, du) = phys.split_at(3);
    par::for_each_chunk_mut(&mut out, 4096, |c, chunk| {
        let base = c * 4096;
        for (off, o) in chunk.iter_mut().enumerate() {
            let x = base + off;
            let v = [uu[0][x], uu[1][x], uu[2][x]];
            let d = |i: usize, j: usize| du[3 * i + j][x];
            let div = d(0, 0) + d(1, 1) + d(2, 2);
            for i in 0..3 {
                let adv = v[0] * d(i, 0) + v[1] * d(i, 1) + v[2] * d(i, 2);
                o[i] = -adv - 0.5 * div * v[i];
            }
        }
    });
    let umax = par::map_collect(n.div_ceil(4096), |c| {
        let r = c * 4096..((c + 1) * 4096).min(n);
        r.map(|x| (uu[0][x].powi(2) + uu[1][x].powi(2) + uu[2][x].powi(2)).sqrt())
            .fold(0.0f64, f64::max)
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    let n1: Vec<f64> = out.iter().map(|o| o[0]).collect();
    let n2: Vec<f64> = out.iter().map(|o| o[1]).collect();
    let n3: Vec<f64> = out.iter().map(|o| o[2]).collect();
    let (c1, c2) = g.forward_pair((&n1, VELOCITY_PARITY[0]), Some((&n2, VELOCITY_PARITY[1])));
    let (c3, _) = g.forward_pair((&n3, VELOCITY_PARITY[2]), None);
    let mk = |mut c: Vec<Complex64>, p| {
        ops::dealias_in_place(&g, &mut c);
        ScalarField::from_coeffs(&g, p, c)
    };
    let res = VectorField::new([
        mk(c1, VELOCITY_PARITY[0]),
        mk(c2.expect("paired transform"), VELOCITY_PARITY[1]),
        mk(c3, VELOCITY_PARITY[2]),
    ]);
    Ok((res, umax))
}

pub fn nonlinear_rhs(u: &VectorField) -> Result<VectorField> {
    Ok(nonlinear_rhs_with_max(u)?.0)
}
