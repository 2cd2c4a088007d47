//! `geob`: runs one eps-sweep study and writes `result.csv`, `result.json`,
//! `plot.gp` and `run.meta`.
//!
//! Exit codes: 0 success, 2 configuration or output error, 3 numerical abort.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use geob_core::acoustic::write_mode_table;
use geob_core::harness::{emit, run_study, study_grid, StudyConfig};
use geob_core::{par, Error};

#[derive(Parser, Debug)]
#[command(
    name = "geob",
    version,
    about = "Epsilon-sweep studies for the rotating weakly compressible slab"
)]
struct Cli {
    /// Flat `key = value` config file; flags override its keys.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    study: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, visible_alias = "eps-list")]
    eps: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    ic_kind: Option<String>,
    #[arg(long)]
    ic_seed: Option<String>,
    #[arg(short, long)]
    output_dir: Option<String>,
    /// Any config key, `KEY=VALUE`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Deterministic sequential execution.
    #[arg(long)]
    serial: bool,
    /// Write the per-mode eigenvalue table of the configured grid and exit.
    #[arg(long, value_name = "PATH")]
    mode_table: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<StudyConfig, Error> {
    let mut cfg = StudyConfig::default();
    if let Some(path) = &cli.config {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    let flags = [
        ("study", &cli.study),
        ("beta", &cli.beta),
        ("eps_list", &cli.eps),
        ("mu", &cli.mu),
        ("t_final", &cli.t_final),
        ("dt", &cli.dt),
        ("ic_kind", &cli.ic_kind),
        ("ic_seed", &cli.ic_seed),
        ("output_dir", &cli.output_dir),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::config(kv.as_str(), "expected KEY=VALUE"))?;
        cfg.set(k.trim(), v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite { .. } | Error::Cfl { .. } => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let cfg = build_config(cli)?;
    if let Some(path) = &cli.mode_table {
        let grid = study_grid(&cfg)?;
        let f = File::create(path).map_err(|e| Error::config("mode_table", format!("{}: {e}", path.display())))?;
        write_mode_table(&mut BufWriter::new(f), &grid)?;
        return Ok(0);
    }
    log::info!("study {} over eps {:?}", cfg.study, cfg.eps_list);
    let result = run_study(&cfg)?;
    emit(&result, &cfg.output_dir)?;
    for f in &result.fits {
        println!(
            "fit {}: exponent {:.4} (residual {:.3e}, {} points)",
            f.metric, f.exponent, f.residual, f.points
        );
    }
    for v in &result.verdicts {
        println!("{}: {} ({})", v.name, if v.passed { "pass" } else { "fail" }, v.detail);
    }
    if result.any_aborted() {
        for r in result.rows.iter().filter(|r| r.message.is_some()) {
            eprintln!("eps {}: {}", r.eps, r.message.as_deref().unwrap_or(""));
        }
        return Ok(3);
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    par::set_serial(cli.serial);
    if let Some(n) = std::env::var("GEOB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        par::init_threads(n);
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
