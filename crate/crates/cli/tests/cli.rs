use std::process::{Command, Output};

use overdamp::io::{read_csv, read_json, AmplitudeRow, GormRateRecord, SpectrumRow, TrajectoryRow};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_overdamp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("proper exit")
}

/// CSV body lines: everything past the comment and header rows.
fn data_lines(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn qbm_rates_match_the_documented_example() {
    let stdout = run_ok(&["qbm", "rates", "--omega0", "1", "--kappa", "1", "--alpha", "100"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let gamma = v["gamma"].as_f64().unwrap();
    assert!((gamma - 0.5051).abs() < 1e-3, "gamma = {gamma}");
    assert_eq!(v["regime"], "normal");
    let kappa_c = v["kappa_c"].as_f64().unwrap();
    assert!((kappa_c - 2.0).abs() < 0.05, "kappa_c = {kappa_c}");
}

#[test]
fn critical_coupling_sits_in_the_documented_band() {
    let stdout = run_ok(&["spin-gorm", "eta-c", "--omega0", "0.01", "--eps", "0"]);
    let eta_c: f64 = stdout.trim().parse().unwrap();
    assert!((eta_c - 0.14).abs() <= 0.005, "eta_c = {eta_c}");
}

#[test]
fn empty_time_grid_is_a_usage_error() {
    let out = run(&[
        "spin-boson", "evolve", "--omega0", "1", "--kappa", "0.1", "--alpha", "10",
        "--beta", "0.01", "--t-max", "1", "--points", "0",
    ]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--points"), "stderr: {stderr}");
}

#[test]
fn missing_and_unknown_parameters_are_usage_errors() {
    let out = run(&["qbm", "rates", "--omega0", "1"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--kappa"));

    let out = run(&["qbm", "rates", "--bogus", "1"]);
    assert_eq!(exit_code(&out), 2);

    let out = run(&["qbm", "oracle", "--omega0", "1", "--kappa", "2", "--alpha", "20",
        "--t-max", "5", "--points", "6", "--n-osc", "400"]);
    assert_eq!(exit_code(&out), 2, "recurrence-limit violations name the bad grid");
    assert!(String::from_utf8_lossy(&out.stderr).contains("recurrence"));
}

#[test]
fn outputs_are_byte_identical_without_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "loop", "spectrum", "--sites", "6", "--q-strength", "1",
            "--no-timestamp", "--out", path.to_str().unwrap(),
        ]);
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn provenance_header_is_json_with_optional_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    run_ok(&[
        "qbm", "sweep", "--omega0", "1", "--alpha", "100",
        "--kappa-min", "1", "--kappa-max", "1", "--out", path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let first = text.lines().next().unwrap();
    let json = first.strip_prefix("# ").expect("comment prefix");
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["tool"], "overdamp");
    assert_eq!(v["command"], "qbm sweep");
    assert!(v["parameters"]["omega0"].is_number());
    assert!(v["timestamp"].is_number());

    run_ok(&[
        "qbm", "sweep", "--omega0", "1", "--alpha", "100", "--no-timestamp",
        "--kappa-min", "1", "--kappa-max", "1", "--out", path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value =
        serde_json::from_str(text.lines().next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert!(v.get("timestamp").is_none());
}

#[test]
fn csv_outputs_round_trip_through_the_readers() {
    let dir = tempfile::tempdir().unwrap();

    let trajectory = dir.path().join("trajectory.csv");
    run_ok(&[
        "spin-boson", "evolve", "--omega0", "1", "--kappa", "0.02", "--alpha", "100",
        "--beta", "0.02", "--t-max", "2", "--points", "5",
        "--out", trajectory.to_str().unwrap(),
    ]);
    let rows: Vec<TrajectoryRow> = read_csv(&trajectory).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].t, 0.0);
    assert_eq!(rows[0].x, 1.0);
    assert_eq!(rows[4].t, 2.0);

    let spectrum = dir.path().join("spectrum.csv");
    run_ok(&[
        "loop", "spectrum", "--sites", "6", "--q-strength", "1",
        "--out", spectrum.to_str().unwrap(),
    ]);
    let rows: Vec<SpectrumRow> = read_csv(&spectrum).unwrap();
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| (1..=6).contains(&r.n)));

    let amplitude = dir.path().join("amplitude.csv");
    run_ok(&[
        "qbm", "amplitude", "--omega0", "1", "--kappa", "1", "--alpha", "100",
        "--t-max", "1", "--points", "3", "--out", amplitude.to_str().unwrap(),
    ]);
    let rows: Vec<AmplitudeRow> = read_csv(&amplitude).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].adot, 1.0);

    let record = dir.path().join("rates.json");
    run_ok(&[
        "spin-gorm", "rates", "--eta", "0.2", "--omega0", "0.01",
        "--out", record.to_str().unwrap(),
    ]);
    let parsed: GormRateRecord = read_json(&record).unwrap();
    assert_eq!(parsed.n, 1500);
    assert_eq!(parsed.seed, 11);
    assert!(parsed.gamma > 0.0);
    assert!(parsed.omega2 < 0.0, "eta = 0.2 sits past the transition");
    let eta_c = parsed.eta_c.expect("transition exists at omega0 = 0.01");
    assert!((eta_c - 0.142857).abs() < 1e-6);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"omega0": 1.0, "kappa": 99.0, "alpha": 100.0, "beta": 2.0}"#,
    )
    .unwrap();

    let stdout = run_ok(&[
        "qbm", "rates", "--config", config.to_str().unwrap(), "--kappa", "1",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["kappa"], 1.0);
    assert_eq!(v["beta"], 2.0);
    assert!((v["gamma"].as_f64().unwrap() - 0.5051).abs() < 1e-3);

    let stdout = run_ok(&["qbm", "rates", "--config", config.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["kappa"], 99.0);
}

#[test]
fn spin_boson_sweep_flips_regime_exactly_once() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    run_ok(&[
        "spin-boson", "sweep", "--omega0", "0.1", "--alpha", "100", "--beta", "0.1",
        "--kappa-min", "0.001", "--kappa-max", "0.01", "--points", "50",
        "--out", path.to_str().unwrap(),
    ]);
    let rows = data_lines(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows.len(), 50);
    let regimes: Vec<&str> = rows.iter().map(|r| r[4].as_str()).collect();
    assert_eq!(regimes[0], "normal");
    assert_eq!(*regimes.last().unwrap(), "overdamped");
    let flips = regimes.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 1);
}

#[test]
fn qbm_sweep_tracks_the_markov_dispersion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    run_ok(&[
        "qbm", "sweep", "--omega0", "1", "--alpha", "100",
        "--kappa-min", "0", "--kappa-max", "3", "--points", "7",
        "--out", path.to_str().unwrap(),
    ]);
    let rows = data_lines(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows.len(), 7);
    for row in &rows {
        let kappa: f64 = row[0].parse().unwrap();
        let omega2: f64 = row[2].parse().unwrap();
        assert_eq!(omega2, 1.0 - 0.25 * kappa * kappa);
    }
}

#[test]
fn zero_length_sweep_emits_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    run_ok(&[
        "qbm", "sweep", "--omega0", "1", "--alpha", "100",
        "--kappa-min", "1.5", "--kappa-max", "1.5", "--points", "50",
        "--out", path.to_str().unwrap(),
    ]);
    let rows = data_lines(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1.5");
}

#[test]
fn compare_writes_both_trajectories_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run_ok(&[
        "spin-gorm", "compare", "--n", "120", "--eta", "0.2", "--omega0", "0.01",
        "--points", "11", "--out-dir", dir.path().to_str().unwrap(), "--no-timestamp",
    ]);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(report["sup_z"].as_f64().unwrap() >= 0.0);

    let exact: Vec<TrajectoryRow> = read_csv(dir.path().join("exact.csv")).unwrap();
    let redfield: Vec<TrajectoryRow> = read_csv(dir.path().join("redfield.csv")).unwrap();
    assert_eq!(exact.len(), 11);
    assert_eq!(redfield.len(), 11);
    assert_eq!(exact[0].t, redfield[0].t);
}

#[test]
fn fig1_curves_cross() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "figures", "fig1", "--points", "31",
        "--out-dir", dir.path().to_str().unwrap(), "--no-timestamp",
    ]);
    let rows = data_lines(&std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap());
    assert_eq!(rows.len(), 31);
    let gamma_sq = |r: &Vec<String>| r[1].parse::<f64>().unwrap();
    let freq_sq = |r: &Vec<String>| r[2].parse::<f64>().unwrap();
    let first = &rows[0];
    let last = &rows[30];
    assert!(gamma_sq(first) > freq_sq(first), "damping dominates at small omega0");
    assert!(gamma_sq(last) < freq_sq(last), "frequency dominates at large omega0");
}

#[test]
fn fig1b_has_a_cusp_in_the_documented_window() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "figures", "fig1b",
        "--out-dir", dir.path().to_str().unwrap(), "--no-timestamp",
    ]);
    let rows = data_lines(&std::fs::read_to_string(dir.path().join("fig1b.csv")).unwrap());
    let curve: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    let mut cusp = None;
    for w in curve.windows(3) {
        let rising = w[1].1 > w[0].1;
        let falling = w[2].1 < w[1].1;
        if rising && falling {
            cusp = Some(w[1].0);
            break;
        }
    }
    let eta = cusp.expect("slope changes sign");
    assert!(
        (0.13..=0.15).contains(&eta),
        "cusp at eta = {eta} outside the documented window"
    );
}

#[test]
fn fig2_initial_row_is_the_documented_state() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "figures", "fig2", "--n", "120", "--points", "9",
        "--out-dir", dir.path().to_str().unwrap(), "--no-timestamp",
    ]);
    for eta in ["0.08", "0.14", "0.20"] {
        for kind in ["exact", "redfield"] {
            let path = dir.path().join(format!("fig2_eta_{eta}_{kind}.csv"));
            let rows: Vec<TrajectoryRow> = read_csv(&path).unwrap();
            assert_eq!(rows.len(), 9, "{}", path.display());
            let first = rows[0];
            assert_eq!(first.t, 0.0);
            assert!((first.x - 8.0f64.sqrt() / 3.0).abs() < 1e-12);
            assert_eq!(first.y, 0.0);
            assert!((first.z - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}

#[test]
fn eta_c_without_a_transition_reports_none() {
    let stdout = run_ok(&["spin-gorm", "eta-c", "--omega0", "0.1", "--eta-max", "0.3"]);
    assert_eq!(stdout.trim(), "none");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta_c.json");
    run_ok(&[
        "spin-gorm", "eta-c", "--omega0", "0.1", "--eta-max", "0.3",
        "--out", path.to_str().unwrap(),
    ]);
    let v: serde_json::Value = read_json(&path).unwrap();
    assert!(v["eta_c"].is_null());
}

#[test]
fn oversized_exact_rings_point_at_the_closed_form() {
    let out = run(&["loop", "spectrum", "--sites", "70", "--q-strength", "1"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("diffusive"));
}
