use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use mbl_calib::config::parse_patch;
use mbl_calib::output::CSV_COLUMNS;
use mbl_calib::{ExperimentConfig, Mode};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mbl-calib"))
}

fn write_config(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, json).unwrap();
    path
}

/// Runs a subcommand and returns the exit code.
fn run(mode: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let status = bin()
        .arg(mode)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .args(if extra.contains(&"--threads") {
            &[][..]
        } else {
            &["--threads", "2"][..]
        })
        .output()
        .unwrap()
        .status;
    status.code().unwrap()
}

/// Data rows of a CSV file after checking the two header lines.
fn data_rows(path: &Path, mode: &str) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with(&format!("# mbl-calib schema_version=1 experiment={mode} config_hash=")));
    assert_eq!(header.rsplit('=').next().unwrap().len(), 64);
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS);
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(name: &str) -> usize {
    CSV_COLUMNS.split(',').position(|c| c == name).unwrap()
}

#[test]
fn spectrum_single_r_gives_one_row_and_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "s.json",
        r#"{"schema_version": 1, "lattice": {"kind": "chain", "n_sites": 8}, "r_values": [0.5]}"#,
    );
    let out = dir.path().join("spectrum.csv");
    assert_eq!(run("spectrum", &cfg, &out, &[]), 0);
    let rows = data_rows(&out, "spectrum");
    assert_eq!(rows.len(), 1);
    let ratio: f64 = rows[0][column("gap_ratio")].parse().unwrap();
    assert!(ratio > 0.0 && ratio < 1.0);
    assert!(rows[0][column("fidelity")].is_empty());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(summary["experiment"], "spectrum");
    assert_eq!(summary["rows"], 1);
}

#[test]
fn idle_row_count_and_zero_time_limit() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "i.json",
        r#"{"schema_version": 1, "lattice": {"kind": "chain", "n_sites": 8},
            "r_values": [0.03, 2.0], "horizon": 7}"#,
    );
    let out = dir.path().join("idle.csv");
    assert_eq!(run("idle", &cfg, &out, &[]), 0);
    assert_eq!(data_rows(&out, "idle").len(), 14);

    let zero = write_config(
        &dir,
        "z.json",
        r#"{"schema_version": 1, "lattice": {"kind": "chain", "n_sites": 8},
            "r_values": [1.0], "horizon": 1, "tau_us": 0.0}"#,
    );
    let out = dir.path().join("zero.csv");
    assert_eq!(run("idle", &zero, &out, &[]), 0);
    let rows = data_rows(&out, "idle");
    assert_eq!(rows.len(), 1);
    let get = |c: &str| rows[0][column(c)].parse::<f64>().unwrap();
    assert!((get("fidelity") - 1.0).abs() < 1e-12);
    assert!((get("ipr") - 1.0).abs() < 1e-12);
    assert!(get("renyi2").abs() < 1e-12);
}

#[test]
fn xeb_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "x.json",
        r#"{"schema_version": 1, "lattice": {"kind": "chain", "n_sites": 6},
            "r_values": [0.1], "ns_values": [0, 2], "seeds": [4, 5], "n_layers": 3,
            "pairs_per_layer": 2, "n_traj": 8}"#,
    );
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(run("xeb", &cfg, &a, &[]), 0);
    assert_eq!(run("xeb", &cfg, &b, &["--threads", "1"]), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // (ns, seed, depth) rows plus per-(ns, depth) seed means
    assert_eq!(data_rows(&a, "xeb").len(), 2 * 2 * 3 + 2 * 3);
}

#[test]
fn xeb_without_hopping_is_perfect() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "h0.json",
        r#"{"schema_version": 1, "lattice": {"kind": "grid", "rows": 2, "cols": 3},
            "model": {"h": 0.0}, "r_values": [0.5], "seeds": [1], "n_layers": 4, "pairs_per_layer": 2}"#,
    );
    let out = dir.path().join("h0-run.csv");
    assert_eq!(run("xeb", &cfg, &out, &[]), 0);
    for row in data_rows(&out, "xeb") {
        let f: f64 = row[column("fidelity")].parse().unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.csv");

    let typo = write_config(&dir, "typo.json", r#"{"schema_version": 1, "horizn": 3}"#);
    assert_eq!(run("idle", &typo, &out, &[]), 2);
    let version = write_config(&dir, "v.json", r#"{"schema_version": 2}"#);
    assert_eq!(run("idle", &version, &out, &[]), 2);
    let mode = write_config(&dir, "m.json", r#"{"schema_version": 1, "mode": "xeb"}"#);
    assert_eq!(run("idle", &mode, &out, &[]), 2);
    let ok = write_config(
        &dir,
        "ok.json",
        r#"{"schema_version": 1, "lattice": {"kind": "chain", "n_sites": 4}, "r_values": [1.0], "horizon": 1}"#,
    );
    assert_eq!(run("idle", &ok, &out, &["--preset", "no-such-preset"]), 2);
    let before = fs::read(&ok).unwrap();
    assert_eq!(run("idle", &ok, &dir.path().join("ok.csv"), &[]), 2);
    assert_eq!(fs::read(&ok).unwrap(), before);

    let guard = write_config(
        &dir,
        "g.json",
        r#"{"schema_version": 1, "lattice": {"kind": "chain", "n_sites": 18}, "r_values": [1.0]}"#,
    );
    assert_eq!(run("spectrum", &guard, &out, &[]), 3);

    assert_eq!(run("idle", &dir.path().join("missing.json"), &out, &[]), 4);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    assert_eq!(run("idle", &ok, &blocker.join("o.csv"), &[]), 4);
    assert!(!out.exists());
}

#[test]
fn thread_env_is_rejected_when_invalid() {
    let dir = TempDir::new().unwrap();
    let ok = write_config(
        &dir,
        "ok.json",
        r#"{"schema_version": 1, "lattice": {"kind": "chain", "n_sites": 4}, "r_values": [1.0], "horizon": 1}"#,
    );
    let status = bin()
        .args(["idle", "--config"])
        .arg(&ok)
        .arg("--out")
        .arg(dir.path().join("o.csv"))
        .env("MBL_CALIB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("MBL_CALIB_THREADS"));
}

#[test]
fn presets_resolve_and_config_round_trips() {
    for preset in ["paper-1d", "paper-2d", "google-like", "ibm-like"] {
        let file = parse_patch(r#"{"schema_version": 1}"#).unwrap();
        let cfg = ExperimentConfig::resolve(Mode::Idle, &file, Some(preset)).unwrap();
        let again = ExperimentConfig::resolve(Mode::Idle, &parse_patch(&cfg.to_json()).unwrap(), None).unwrap();
        assert_eq!(cfg.to_json(), again.to_json(), "{preset}");
        assert_eq!(cfg.hash(), again.hash());
    }
}
