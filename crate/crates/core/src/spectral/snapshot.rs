//! Text snapshot format.
//!
//! ```text
//! GEOB1 scalar|vector N_h N_v L_h parity t
//! kx ky kz re im                      (scalar)
//! kx ky kz re1 im1 re2 im2 re3 im3    (vector)
//! ```
//!
//! One row per stored mode (every non-Nyquist horizontal pair and every
//! `0 <= kz < N_v`), sorted by `(kx, ky, kz)`. Vector parities are written
//! comma-separated, e.g. `even,even,odd`. Floats carry 17 significant digits
//! so a write/read cycle is bit-exact.

use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, Parity, ScalarField, VectorField};

pub const MAGIC: &str = "GEOB1";

#[derive(Clone, Debug)]
pub enum Snapshot {
    Scalar(ScalarField),
    Vector(VectorField),
}

fn sorted_slots(g: &Grid) -> Vec<(i64, i64, usize, usize)> {
    let n_h = g.n_h();
    let mut rows = Vec::with_capacity(g.n_spec());
    for ix in 0..n_h {
        if g.is_nyquist(ix) {
            continue;
        }
        for iy in 0..n_h {
            if g.is_nyquist(iy) {
                continue;
            }
            for k in 0..g.n_v() {
                rows.push((g.signed(ix), g.signed(iy), k, g.spec_index(ix, iy, k)));
            }
        }
    }
    rows.sort_unstable_by_key(|&(a, b, k, _)| (a, b, k));
    rows
}

fn write_header<W: Write>(w: &mut W, kind: &str, g: &Grid, parity: &str, t: f64) -> Result<()> {
    writeln!(
        w,
        "{MAGIC} {kind} {} {} {:.16e} {parity} {:.16e}",
        g.n_h(),
        g.n_v(),
        g.l_h(),
        t
    )?;
    Ok(())
}

pub fn write_scalar<W: Write>(w: &mut W, f: &ScalarField, t: f64) -> Result<()> {
    let f = f.to_spectral();
    let g = f.grid().clone();
    let c = f.coeffs()?;
    write_header(w, "scalar", &g, f.parity().as_str(), t)?;
    for (a, b, k, idx) in sorted_slots(&g) {
        writeln!(w, "{a} {b} {k} {:.16e} {:.16e}", c[idx].re, c[idx].im)?;
    }
    Ok(())
}

pub fn write_vector<W: Write>(w: &mut W, u: &VectorField, t: f64) -> Result<()> {
    let u = u.to_spectral();
    let g = u.grid().clone();
    let parity = u.parities().map(|p| p.as_str()).join(",");
    write_header(w, "vector", &g, &parity, t)?;
    let cs: Vec<&[Complex64]> = u.comps.iter().map(|c| c.coeffs()).collect::<Result<_>>()?;
    for (a, b, k, idx) in sorted_slots(&g) {
        write!(w, "{a} {b} {k}")?;
        for c in &cs {
            write!(w, " {:.16e} {:.16e}", c[idx].re, c[idx].im)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Snapshot { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("bad {what}")))
}

/// Reads a snapshot; `dealias_fraction` configures the reconstructed grid.
pub fn read<R: BufRead>(r: R, dealias_fraction: f64) -> Result<(Snapshot, f64)> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| perr(1, "empty file"))??;
    let mut tok = header.split_whitespace();
    if tok.next() != Some(MAGIC) {
        return Err(perr(1, "missing GEOB1 magic"));
    }
    let kind = tok.next().ok_or_else(|| perr(1, "missing kind"))?.to_string();
    let n_h: usize = num(tok.next(), 1, "N_h")?;
    let n_v: usize = num(tok.next(), 1, "N_v")?;
    let l_h: f64 = num(tok.next(), 1, "L_h")?;
    let parity_tok = tok.next().ok_or_else(|| perr(1, "missing parity"))?;
    let t: f64 = num(tok.next(), 1, "t")?;
    let grid: Arc<Grid> = if n_v == 1 {
        Grid::horizontal(l_h, n_h, dealias_fraction)?
    } else {
        Grid::new(l_h, n_h, n_v, dealias_fraction)?
    };
    let parities: Vec<Parity> = parity_tok
        .split(',')
        .map(|p| Parity::parse(p).ok_or_else(|| perr(1, format!("bad parity `{p}`"))))
        .collect::<Result<_>>()?;
    let ncomp = match kind.as_str() {
        "scalar" => 1,
        "vector" => 3,
        other => return Err(perr(1, format!("unknown kind `{other}`"))),
    };
    if parities.len() != ncomp {
        return Err(perr(1, "parity count does not match kind"));
    }
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); grid.n_spec()]; ncomp];
    let mut count = 0usize;
    for (lineno, line) in lines.enumerate() {
        let lineno = lineno + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let a: i64 = num(tok.next(), lineno, "kx")?;
        let b: i64 = num(tok.next(), lineno, "ky")?;
        let k: usize = num(tok.next(), lineno, "kz")?;
        let half = (n_h / 2) as i64;
        if a.abs() >= half || b.abs() >= half || k >= n_v {
            return Err(perr(lineno, "mode outside grid"));
        }
        let idx = grid.spec_index(grid.position(a), grid.position(b), k);
        for c in coeffs.iter_mut() {
            let re: f64 = num(tok.next(), lineno, "re")?;
            let im: f64 = num(tok.next(), lineno, "im")?;
            c[idx] = Complex64::new(re, im);
        }
        count += 1;
    }
    let expected = (n_h - 1) * (n_h - 1) * n_v;
    if count != expected {
        return Err(perr(0, format!("expected {expected} rows, found {count}")));
    }
    let mut fields: Vec<ScalarField> = coeffs
        .into_iter()
        .zip(&parities)
        .map(|(c, &p)| ScalarField::from_coeffs(&grid, p, c))
        .collect();
    let snap = if ncomp == 1 {
        Snapshot::Scalar(fields.pop().unwrap())
    } else {
        let c = fields.pop().unwrap();
        let b = fields.pop().unwrap();
        let a = fields.pop().unwrap();
        Snapshot::Vector(VectorField::new([a, b, c]))
    };
    Ok((snap, t))
}
