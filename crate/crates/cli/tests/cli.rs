use std::path::Path;
use std::process::{Command, Output};

const SMALL: [&str; 8] = [
    "--set",
    "n_h=16",
    "--set",
    "n_v=4",
    "--set",
    "ic_band=4",
    "--t-final",
    "0.02",
];

fn geob(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geob"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("spawn geob")
}

#[test]
fn smoke_acoustic_decay() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["--study", "acoustic_decay", "--beta", "1", "--eps", "0.2,0.1,0.05"];
    args.extend(SMALL);
    let out = geob(&args, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["result.csv", "result.json", "plot.gp", "run.meta"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "eps,D,status");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(json["columns"][0]["name"], "D");
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
    assert!(json["fits"][0]["exponent"].is_number());
}

#[test]
fn malformed_eps_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for eps in ["0.2,abc", "0.1,0.2", ""] {
        let out = geob(&["--study", "acoustic_decay", "--eps", eps], dir.path());
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("eps_list"), "{eps}");
    }
    assert!(!dir.path().join("result.csv").exists());
}

#[test]
fn unknown_study_and_missing_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = geob(&["--study", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = geob(&["--config", "/nonexistent/geob.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nan_abort_flags_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "--study",
        "acoustic_decay",
        "--eps",
        "0.2,0.1",
        "--set",
        "ic_amplitude=1e200",
    ];
    args.extend(SMALL);
    let out = geob(&args, dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",aborted")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(
        &cfg,
        "study = convergence_beta_ge1\nbeta = 2\neps_list = 0.2, 0.1\nn_h = 16\nn_v = 4\nic_band = 4\nt_final = 0.01\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = geob(
        &["--config", cfg.to_str().unwrap(), "--beta", "1", "--serial"],
        &out_dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = std::fs::read_to_string(out_dir.join("run.meta")).unwrap();
    assert!(meta.contains("beta = 1\n"));
    assert!(meta.contains("serial = true"));
    assert!(meta.contains("study = convergence_beta_ge1"));
}

#[test]
fn serial_runs_are_bitwise_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "--study",
        "rage_decay",
        "--beta",
        "0.5",
        "--eps",
        "0.2,0.1",
        "--ic-kind",
        "ill",
        "--serial",
    ];
    args.extend(SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(geob(&args, &a).status.code(), Some(0));
    assert_eq!(geob(&args, &b).status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("result.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn writes_mode_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modes.csv");
    let out = geob(
        &[
            "--set",
            "n_h=8",
            "--set",
            "n_v=4",
            "--mode-table",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("kx,ky,kz,"));
    assert!(text.lines().count() > 1);
}
