use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::studies::StudyResult;

pub const FILES: [&str; 4] = ["result.csv", "result.json", "plot.gp", "run.meta"];

/// `eps, <metrics...>, status`, one row per eps in sweep order.
pub fn csv(result: &StudyResult) -> String {
    let mut s = String::from("eps");
    for c in &result.columns {
        s.push(',');
        s.push_str(&c.name);
    }
    s.push_str(",status\n");
    for r in &result.rows {
        let _ = write!(s, "{:e}", r.eps);
        for m in &r.metrics {
            let _ = write!(s, ",{m:e}");
        }
        let _ = writeln!(s, ",{}", r.status.as_str());
    }
    s
}

/// Gnuplot script plotting every fitted metric against eps on log axes.
pub fn gnuplot(result: &StudyResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} : metrics versus eps", result.study);
    s.push_str("set datafile separator ','\nset key autotitle columnhead\nset logscale xy\n");
    s.push_str("set xlabel 'eps'\nset ylabel 'metric'\nset grid\n");
    s.push_str("set terminal pngcairo size 800,600\n");
    let _ = writeln!(s, "set output '{}.png'", result.study);
    let plots: Vec<String> = result
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let fit = result
                .fit(&c.name)
                .map(|f| format!(" title '{} (slope {:.3})'", c.name, f.exponent))
                .unwrap_or_default();
            format!("'result.csv' using 1:{} with linespoints{fit}", i + 2)
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

pub fn meta(result: &StudyResult) -> String {
    let p = &result.provenance;
    let mut s = String::new();
    let _ = writeln!(s, "version = {}", p.version);
    let _ = writeln!(s, "study = {}", result.study);
    let _ = writeln!(s, "seed = {}", p.seed);
    let _ = writeln!(s, "serial = {}", p.serial);
    let _ = writeln!(s, "dt = {:e}", p.dt);
    let _ = writeln!(s, "steps = {}", p.steps);
    let _ = writeln!(s, "samples = {}", result.times.len());
    for f in &result.fits {
        let _ = writeln!(
            s,
            "fit.{} = {:.6} (residual {:.3e}, {} points)",
            f.metric, f.exponent, f.residual, f.points
        );
    }
    for v in &result.verdicts {
        let _ = writeln!(
            s,
            "verdict.{} = {} ({})",
            v.name,
            if v.passed { "pass" } else { "fail" },
            v.detail
        );
    }
    for n in &result.notes {
        let _ = writeln!(s, "note = {n}");
    }
    s.push_str("[config]\n");
    s.push_str(&p.config);
    s
}

/// Writes the four result files into `dir`, creating it if needed.
pub fn emit(result: &StudyResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::config("output_dir", format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let json = serde_json::to_string_pretty(result)?;
    let bodies = [csv(result), json, gnuplot(result), meta(result)];
    let mut out = Vec::new();
    for (name, body) in FILES.iter().zip(bodies) {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io)?;
        out.push(path);
    }
    Ok(out)
}
