use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    let out = dir.to_str().unwrap();
    all.extend(["--out", out]);
    lab(&all)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn fit<'a>(diag: &'a Value, s: f64, weight: &str) -> &'a Value {
    diag["growth_fits"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["s"] == s && f["weight"] == weight)
        .unwrap()
}

#[test]
fn identical_configs_give_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for preset in ["paper-blowup", "phase-rotation", "verify-identities"] {
        assert!(run_in(&a, &["--preset", preset]).status.success());
        assert!(run_in(&b, &["--preset", preset]).status.success());
        for name in ["trajectory.csv", "diagnostics.json"] {
            if a.join(name).exists() {
                assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{preset}: {name}");
            }
        }
        assert_eq!(json(&a.join("manifest.json"))["content_hash"], json(&b.join("manifest.json"))["content_hash"]);
    }
}

#[test]
fn growth_preset_reports_unit_slope() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["--preset", "paper-blowup", "--alpha", "1", "--t-end", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let diag = json(&tmp.path().join("diagnostics.json"));
    let f = fit(&diag, 1.0, "homogeneous");
    assert!((f["slope"].as_f64().unwrap() - 1.0).abs() <= 0.05, "{f}");
    assert_eq!(f["predicted"], 1.0);
    assert_eq!(diag["discriminant"]["growth_condition"], true);
}

#[test]
fn identity_preset_reports_small_residuals() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["--preset", "verify-identities", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let diag = json(&tmp.path().join("diagnostics.json"));
    assert!(diag["identities"]["max_hpi_residual"].as_f64().unwrap() <= 1e-10);
    assert!(diag["identities"]["max_k_square_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(diag["trials"], 100);
    assert!(!tmp.path().join("trajectory.csv").exists());
}

#[test]
fn negative_alpha_preset_is_certified_bounded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["--preset", "alpha-negative", "--alpha", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let diag = json(&tmp.path().join("diagnostics.json"));
    for cert in diag["boundedness"].as_array().unwrap() {
        assert!(cert["ratio_late_to_early"].as_f64().unwrap() <= 2.0, "{cert}");
    }
}

#[test]
fn presets_are_listed_and_finish_quickly() {
    let listing = String::from_utf8(lab(&["--list-presets"]).stdout).unwrap();
    let names: Vec<&str> = listing.lines().filter_map(|l| l.split_whitespace().next()).collect();
    for required in ["small-data", "kronecker-rank", "paper-blowup", "cascade-profile"] {
        assert!(names.contains(&required), "{listing}");
    }
    let tmp = tempfile::tempdir().unwrap();
    for name in names {
        let start = Instant::now();
        let out = run_in(&tmp.path().join(name), &["--preset", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(start.elapsed() <= Duration::from_secs(60), "{name} took {:?}", start.elapsed());
    }
}

#[test]
fn config_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec!["--preset", "no-such-preset"],
        vec!["--mode", "full", "--n", "100"],
        vec!["--mode", "reduced", "--p", "1.5,0"],
        vec!["--mode", "exact", "--c", "2,0"],
        vec!["--dt", "-1"],
    ] {
        let out = run_in(tmp.path(), &args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    }
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "[run]\nalfa = 1.0\n").unwrap();
    assert_eq!(run_in(tmp.path(), &["--config", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn pole_guard_abort_keeps_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("guard.toml");
    fs::write(&cfg, "[run]\npreset = \"paper-blowup\"\n\n[integrator]\nt_end = 10.0\npole_guard = 0.999\n").unwrap();
    let dir = tmp.path().join("run");
    let out = run_in(&dir, &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["stop"]["reason"], "pole_guard");
    assert_eq!(manifest["exit_code"], 2);
    // tanh t = 0.999 near t = 3.8
    let t_stop = manifest["stop"]["t"].as_f64().unwrap();
    assert!((t_stop - 0.999f64.atanh()).abs() < 0.06, "{t_stop}");
    let csv = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(csv.lines().count() > 50);
}

#[test]
fn failed_verification_exits_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("strict.toml");
    fs::write(&cfg, "[run]\npreset = \"verify-identities\"\ntrials = 5\n\n[verify]\nhpi_tol = 0.0\nk_square_tol = 0.0\n").unwrap();
    let out = run_in(&tmp.path().join("run"), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let diag = json(&tmp.path().join("run/diagnostics.json"));
    assert_eq!(diag["passed"], false);
}

#[test]
fn horizon_warning_lands_in_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let base = ["--mode", "full", "--n", "64", "--alpha", "1", "--dt", "0.01"];
    let mut inside = base.to_vec();
    inside.extend(["--t-end", "1"]);
    let mut outside = base.to_vec();
    outside.extend(["--t-end", "1.5"]);

    assert!(run_in(&tmp.path().join("in"), &inside).status.success());
    assert!(json(&tmp.path().join("in/manifest.json"))["warnings"].as_array().unwrap().is_empty());

    let out = run_in(&tmp.path().join("out"), &outside);
    assert!(out.status.success());
    let warnings = json(&tmp.path().join("out/manifest.json"))["warnings"].clone();
    assert!(warnings[0].as_str().unwrap().starts_with("horizon"), "{warnings}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(
        &cfg,
        "[run]\nmode = \"reduced\"\nalpha = 2.0\n\n[initial]\nb = [0.5, 0.0]\nc = [1.0, 0.0]\np = [0.2, 0.1]\n\n[integrator]\nt_end = 0.5\nsample_every = 0.1\n",
    )
    .unwrap();
    let out = run_in(&tmp.path().join("run"), &["--config", cfg.to_str().unwrap(), "--alpha", "3", "--p", "-0.1,0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = json(&tmp.path().join("run/manifest.json"));
    assert_eq!(manifest["config"]["alpha"], 3.0);
    assert_eq!(manifest["config"]["t_end"], 0.5);
    assert_eq!(manifest["config"]["initial"]["b"], serde_json::json!([0.5, 0.0]));
    assert_eq!(manifest["config"]["initial"]["p"], serde_json::json!([-0.1, 0.0]));
}

#[test]
fn csv_fields_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_in(tmp.path(), &["--preset", "small-data", "--t-end", "2"]).status.success());
    let csv = fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..3], ["t", "b_re", "b_im"]);
    assert!(header.contains(&"discriminant") && header.contains(&"H^2.0"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), header.len());
        for f in fields {
            let x: f64 = f.parse().unwrap();
            assert_eq!(serde_json::Number::from_f64(x).unwrap().to_string(), f);
        }
    }
    let first: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(first, 0.1 / std::f64::consts::SQRT_2);
}

#[test]
fn json_format_writes_trajectory_json() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_in(tmp.path(), &["--preset", "cascade-profile", "--format", "json"]).status.success());
    let traj = json(&tmp.path().join("trajectory.json"));
    assert_eq!(traj["columns"][0], "t");
    assert_eq!(traj["rows"].as_array().unwrap().len(), 25);
    let manifest = json(&tmp.path().join("manifest.json"));
    let files: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|f| f["file"].as_str().unwrap()).collect();
    assert_eq!(files, ["trajectory.json", "diagnostics.json"]);
    let diag = json(&tmp.path().join("diagnostics.json"));
    let modes = diag["dominant_modes"].as_array().unwrap();
    let ks: Vec<u64> = modes.iter().map(|m| m[1].as_u64().unwrap()).collect();
    assert!(ks.windows(2).all(|w| w[0] <= w[1]), "{ks:?}");
}

#[test]
fn sweep_partitions_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["--preset", "paper-blowup", "--t-end", "2", "--sweep", "alpha=0.5,1,2", "--sweep", "dt=0.001,0.002"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let index = json(&tmp.path().join("sweep.json"));
    let entries = index.as_array().unwrap();
    assert_eq!(entries.len(), 6);
    for (i, e) in entries.iter().enumerate() {
        assert_eq!(e["index"], i);
        let dir = tmp.path().join(format!("run-{i:03}"));
        let manifest = json(&dir.join("manifest.json"));
        assert_eq!(manifest["content_hash"], e["content_hash"]);
        assert_eq!(manifest["config"]["alpha"], e["parameters"][0][1]);
    }
    // Repeat: the grid is deterministic regardless of scheduling.
    let again = tmp.path().join("again");
    run_in(&again, &["--preset", "paper-blowup", "--t-end", "2", "--sweep", "alpha=0.5,1,2", "--sweep", "dt=0.001,0.002"]);
    let second = json(&again.join("sweep.json"));
    for (a, b) in entries.iter().zip(second.as_array().unwrap()) {
        assert_eq!(a["content_hash"], b["content_hash"]);
    }
}
