use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn run(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{cmd}-config.json"));
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_groupspectra"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

const PERTURB: &str = r#"{
  "command": "perturb",
  "group": {"family": "heisenberg", "m": 1, "n": 4},
  "subgroup": {"kind": "heisenberg_integer_points"},
  "noise": {"kind": "coordinate_discretized_gaussian", "sigma": 1.0, "radius": 1.0},
  "trials": 60,
  "seed": 3,
  "epsilon": 0.9,
  "l": 4.0,
  "plot": true
}"#;

#[test]
fn reps_lists_heisenberg_labels() {
    let dir = TempDir::new().unwrap();
    let out = run("reps", r#"{"command": "reps", "group": {"family": "heisenberg", "m": 1, "n": 3}}"#, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("out/reps.json"));
    assert_eq!(doc["irreps"].as_array().unwrap().len(), 11);
    assert_eq!(doc["sum_dim_sq"], 27);
    let dims: u64 = doc["irreps"].as_array().unwrap().iter().map(|p| p["dim"].as_u64().unwrap().pow(2)).sum();
    assert_eq!(dims, 27);
}

#[test]
fn dirac_perturbation_has_zero_error() {
    let dir = TempDir::new().unwrap();
    let config = PERTURB.replace(
        r#"{"kind": "coordinate_discretized_gaussian", "sigma": 1.0, "radius": 1.0}"#,
        r#"{"kind": "dirac", "element": [1, 2, 3]}"#,
    );
    let out = run("perturb", &config, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&dir.path().join("out/summary.json"));
    assert_eq!(summary["exceedances"], 0);
    assert!(summary["max_err_sq"].as_f64().unwrap() < 1e-26);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(run("perturb", PERTURB, a.path(), &["--threads", "1"]).status.success());
    assert!(run("perturb", PERTURB, b.path(), &["--threads", "8"]).status.success());
    for f in ["trials.csv", "summary.json", "err_sq_histogram.svg"] {
        assert_eq!(
            fs::read(a.path().join("out").join(f)).unwrap(),
            fs::read(b.path().join("out").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn summary_is_reproducible_from_trial_log() {
    let dir = TempDir::new().unwrap();
    assert!(run("perturb", PERTURB, dir.path(), &[]).status.success());
    let summary = read_json(&dir.path().join("out/summary.json"));
    let mut reader = csv::Reader::from_path(dir.path().join("out/trials.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["trial", "err_sq", "bound_rhs", "exceeded", "seed_lo", "seed_hi"]);
    let mut errs = Vec::new();
    let mut exceeded = 0;
    for row in reader.records() {
        let row = row.unwrap();
        errs.push(row[1].parse::<f64>().unwrap());
        exceeded += (&row[3] == "true") as u64;
    }
    errs.sort_by(f64::total_cmp);
    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
    assert_eq!(summary["mean_err_sq"].as_f64().unwrap(), mean);
    assert_eq!(summary["max_err_sq"].as_f64().unwrap(), errs[errs.len() - 1]);
    assert_eq!(summary["median_err_sq"].as_f64().unwrap(), errs[29]);
    assert_eq!(summary["p95_err_sq"].as_f64().unwrap(), errs[56]);
    assert_eq!(summary["exceedances"].as_u64().unwrap(), exceeded);
}

#[test]
fn seed_override_changes_the_draws() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(run("perturb", PERTURB, a.path(), &[]).status.success());
    assert!(run("perturb", PERTURB, b.path(), &["--seed-override", "4"]).status.success());
    assert_ne!(fs::read(a.path().join("out/trials.csv")).unwrap(), fs::read(b.path().join("out/trials.csv")).unwrap());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run(
        "reps",
        r#"{"command": "reps", "group": {"family": "dihedral", "n": 4}, "colour": "red"}"#,
        dir.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "config");
    assert!(!dir.path().join("out/reps.json").exists());
}

#[test]
fn command_must_match_config() {
    let dir = TempDir::new().unwrap();
    let out = run("dft", r#"{"command": "reps", "group": {"family": "dihedral", "n": 4}}"#, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "config");
}

#[test]
fn precondition_failure_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let config = r#"{
      "command": "bound",
      "group": {"family": "heisenberg", "m": 1, "n": 4},
      "subgroup": {"kind": "heisenberg_integer_points"},
      "noise": {"kind": "uniform_on_group"},
      "epsilon": 0.5,
      "l": 4.0
    }"#;
    let out = run("bound", config, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "precondition");
    assert!(err["message"].as_str().unwrap().contains("epsilon"));
}

#[test]
fn resource_cap_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let out =
        run("reps", r#"{"command": "reps", "group": {"family": "heisenberg", "m": 1, "n": 1000}}"#, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "resource");
}

#[test]
fn bound_reports_values() {
    let dir = TempDir::new().unwrap();
    let config = r#"{
      "command": "bound",
      "group": {"family": "heisenberg", "m": 2, "n": 4},
      "subgroup": {"kind": "heisenberg_integer_points"},
      "noise": {"kind": "uniform_on_group"},
      "epsilon": 0.9,
      "l": 4.0,
      "delta": 0.1
    }"#;
    let out = run("bound", config, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("out/bound.json"));
    assert!((doc["dual_norm_bound"]["rhs"].as_f64().unwrap() - 492.8).abs() < 1e-9);
    assert_eq!(doc["inputs"]["max_dim"], 8);
}

#[test]
fn dft_writes_matching_json_and_binary() {
    let dir = TempDir::new().unwrap();
    let config =
        r#"{"command": "dft", "group": {"family": "dihedral", "n": 5}, "function": {"kind": "random", "seed": 2}}"#;
    assert!(run("dft", config, dir.path(), &[]).status.success());
    let json: groupspectra::spectra::SpectralField =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/spectrum.json")).unwrap()).unwrap();
    let bin =
        groupspectra::spectra::SpectralField::read_binary(&fs::read(dir.path().join("out/spectrum.bin")).unwrap()[..])
            .unwrap();
    assert_eq!(json, bin);
    assert_eq!(json.blocks.len(), 4);
}

#[test]
fn denoise_recovers_translated_subgroup() {
    let dir = TempDir::new().unwrap();
    let config = r#"{
      "command": "denoise",
      "group": {"family": "dihedral", "n": 6},
      "subgroup": {"kind": "dihedral_rotations", "order": 3},
      "noise": {"kind": "dirac", "element": [1, 1]},
      "seed": 0
    }"#;
    assert!(run("denoise", config, dir.path(), &[]).status.success());
    let doc = read_json(&dir.path().join("out/denoise.json"));
    assert_eq!(doc["recovered_count"], doc["irrep_count"]);
    assert!(doc["max_error_on_recovered"].as_f64().unwrap() < 1e-12);
}

#[test]
fn limit_sweep_writes_csv_and_manifest() {
    let dir = TempDir::new().unwrap();
    let config = r#"{
      "command": "limit",
      "target": {
        "kind": "heisenberg", "lambda": 1.0, "k": 1,
        "phi": {"kind": "triangle", "center": 0.0, "radius": 1.0},
        "psi": {"kind": "smooth_bump", "center": 0.2, "radius": 0.8}
      },
      "ladder": [{"m": 2, "n": 4}, {"m": 4, "n": 4}, {"m": 8, "n": 4}],
      "plot": true
    }"#;
    let out = run("limit", config, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m,N,c_m,discrete_re,discrete_im,continuum_re,continuum_im,gap");
    assert_eq!(lines.count(), 3);
    let manifest = read_json(&dir.path().join("out/sweep.json"));
    assert_eq!(manifest["rows"].as_array().unwrap().len(), 3);
    assert!(dir.path().join("out/sweep_gap.svg").exists());

    let euclid = r#"{
      "command": "limit",
      "target": {"kind": "euclidean", "d": 1, "r": 1, "lambda": [0.0]},
      "ladder": [{"m": 2, "n": 6}]
    }"#;
    let dir = TempDir::new().unwrap();
    assert!(run("limit", euclid, dir.path(), &[]).status.success());
    let text = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "2,6,,1.0,0.0,1.0,0.0,0.0");
}
