use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn spincool(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spincool"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("SPINCOOL")) {
        cmd.env_remove(k);
    }
    cmd.envs(env.iter().copied());
    cmd.output().expect("spawn spincool")
}

fn run_ok(args: &[&str]) -> Output {
    let out = spincool(args, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn chain_gap_scan_fits_diffusive_exponent() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "scan");
    run_ok(&["gap-scan", "--set", "lattice.sizes=[16, 24, 32, 48, 64, 96, 128, 192, 256]", "--out", &out]);
    let fits = read_json(&Path::new(&out).join("fit.json"));
    let power = fits.as_array().unwrap().iter().find(|f| f["model"] == "power_law").unwrap();
    let z = power["z"].as_f64().unwrap();
    assert!((z - 2.0).abs() < 0.05, "z = {z}");
    assert_eq!(power["window"], serde_json::json!([96, 128, 192, 256]));
    let gaps = std::fs::read_to_string(Path::new(&out).join("gaps.csv")).unwrap();
    assert_eq!(gaps.lines().next(), Some("geometry,bc,L,N,gap"));
    assert_eq!(gaps.lines().count(), 10);
}

#[test]
fn closure_check_accepts_builtin_q() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "closure");
    run_ok(&["closure-check", "--set", "jump.builtin=q", "--out", &out]);
    let report = read_json(&Path::new(&out).join("closure.json"));
    assert_eq!(report["summary"]["passed"], true);
    assert_eq!(report["summary"]["consistent_with_brute_force"], true);
}

#[test]
fn oracle_compare_small_chain_agrees() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "oracle");
    run_ok(&["oracle-compare", "--set", "lattice.extent=4", "--out", &out]);
    let summary = read_json(&Path::new(&out).join("comparison.json"));
    assert!(summary["max_deviation"].as_f64().unwrap() <= 1e-8, "{summary}");
}

#[test]
fn identical_config_gives_identical_tables() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        r#"
[lattice]
geometry = "chain"
extent = 4
bc = "open"

[scenario]
kind = "thermal"
kappa_over_gamma = 0.2
T_over_h = 1.5

[numerics]
initial = "random"

[numerics.times]
first = 0.05
last = 5.0
count = 7
"#,
    )
    .unwrap();
    let cfg = config.display().to_string();
    let (a, b) = (out_arg(&dir, "a"), out_arg(&dir, "b"));
    run_ok(&["oracle-compare", "--config", &cfg, "--seed", "11", "--threads", "1", "--out", &a]);
    run_ok(&["oracle-compare", "--config", &cfg, "--seed", "11", "--threads", "2", "--out", &b]);
    let read = |d: &str| std::fs::read(Path::new(d).join("deviation.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    let c = out_arg(&dir, "c");
    run_ok(&["oracle-compare", "--config", &cfg, "--seed", "12", "--out", &c]);
    assert_ne!(read(&a), read(&c));

    let (p, q) = (out_arg(&dir, "p"), out_arg(&dir, "q"));
    let grid = [
        "--set",
        "lattice.extent=8",
        "--set",
        "numerics.gamma_over_kappa.count=3",
        "--set",
        "numerics.T_over_h.count=3",
    ];
    run_ok(&[&["phase-diagram", "--threads", "1", "--out", &p][..], &grid[..]].concat());
    run_ok(&[&["phase-diagram", "--threads", "3", "--out", &q][..], &grid[..]].concat());
    let phase = |d: &str| std::fs::read(Path::new(d).join("phase.csv")).unwrap();
    assert_eq!(phase(&p), phase(&q));
}

#[test]
fn manifest_describes_every_output() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "evolve");
    run_ok(&[
        "evolve",
        "--set",
        "lattice.extent=6",
        "--set",
        "scenario.kind=field",
        "--set",
        "scenario.eta=0.4",
        "--set",
        "numerics.times.count=5",
        "--out",
        &out,
    ]);
    let manifest = read_json(&Path::new(&out).join("manifest.json"));
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config"]["scenario"]["eta"], 0.4);
    let listed: BTreeSet<String> =
        manifest["artifacts"].as_array().unwrap().iter().map(|a| a["file"].as_str().unwrap().to_string()).collect();
    let on_disk: BTreeSet<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|f| f != "manifest.json")
        .collect();
    assert_eq!(listed, on_disk);
    let csv = std::fs::read_to_string(Path::new(&out).join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("tau,channel,pair_or_site_index,value"));
    for line in csv.lines().skip(1) {
        let value: &str = line.rsplit(',').next().unwrap();
        let parsed: f64 = value.parse().unwrap();
        assert_eq!(format!("{parsed:?}"), value);
    }
}

#[test]
fn invalid_config_lists_every_problem() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "bad");
    let result = spincool(
        &[
            "evolve",
            "--set",
            "lattice.geometry=pentagon",
            "--set",
            "scenario.kind=field",
            "--set",
            "numerics.times.first=-1",
            "--out",
            &out,
        ],
        &[],
    );
    assert_eq!(result.status.code(), Some(2));
    let err = read_json(&Path::new(&out).join("error.json"));
    assert_eq!(err["kind"], "config");
    let messages: Vec<&str> = err["errors"].as_array().unwrap().iter().map(|m| m.as_str().unwrap()).collect();
    for key in ["lattice.geometry", "lattice.extent", "scenario.eta", "numerics.times.first"] {
        assert!(messages.iter().any(|m| m.starts_with(key)), "{key} missing from {messages:?}");
    }
}

#[test]
fn environment_overrides_file_and_flags_override_environment() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("gap.toml");
    std::fs::write(&config, "[lattice]\nextent = 8\n[output]\ndirectory = \"unused\"\n").unwrap();
    let cfg = config.display().to_string();
    let out = out_arg(&dir, "env");
    let result = spincool(&["gap", "--config", &cfg], &[("SPINCOOL__LATTICE__EXTENT", "12"), ("SPINCOOL_OUT", &out)]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let manifest = read_json(&Path::new(&out).join("manifest.json"));
    assert_eq!(manifest["config"]["lattice"]["extent"], 12);
    assert_eq!(manifest["summary"]["n_sites"], 12);

    let flagged = out_arg(&dir, "flag");
    let result = spincool(
        &["gap", "--config", &cfg, "--set", "lattice.extent=10", "--out", &flagged],
        &[("SPINCOOL__LATTICE__EXTENT", "12"), ("SPINCOOL_OUT", &out)],
    );
    assert!(result.status.success());
    assert_eq!(read_json(&Path::new(&flagged).join("manifest.json"))["summary"]["n_sites"], 10);
}

#[test]
fn two_spin_matches_exact_solver() {
    let dir = TempDir::new().unwrap();
    let out = out_arg(&dir, "two");
    run_ok(&["two-spin", "--set", "scenario.kind=field", "--set", "scenario.eta=1.0", "--out", &out]);
    let summary = read_json(&Path::new(&out).join("two_spin.json"));
    assert!(summary["max_oracle_deviation"].as_f64().unwrap() < 1e-10);
}
