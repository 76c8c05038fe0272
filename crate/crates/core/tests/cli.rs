//! End-to-end tests of the command-line interface.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_raman-tuner"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn grid_csv_values_and_kinds() {
    let out = run(&["grid", "--k-max", "2", "--l-max", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,l,detuning_abs,theta,op_time,period_slow,period_fast,kind"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // (1,1), (1,2), (2,1), (2,2), (2,3), (2,4)
    assert_eq!(rows.len(), 6);

    let row11 = &rows[0];
    assert_eq!((row11[0], row11[1]), ("1", "1"));
    let d11: f64 = row11[2].parse().unwrap();
    assert!((d11 - 0.8165).abs() < 1e-4);
    assert_eq!(row11[7], "pi/2");

    let row12 = &rows[1];
    assert_eq!(row12[7], "pi");
    let d12: f64 = row12[2].parse().unwrap();
    assert_eq!(d12, 0.0);

    let row24 = rows.iter().find(|r| r[0] == "2" && r[1] == "4").unwrap();
    assert_eq!(row24[7], "none");
}

#[test]
fn grid_runs_are_deterministic() {
    let a = run(&["grid", "--k-max", "4", "--l-max", "3"]);
    let b = run(&["grid", "--k-max", "4", "--l-max", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn grid_csv_and_json_carry_identical_numbers() {
    let csv = run(&["grid", "--k-max", "3", "--l-max", "2"]);
    let json = run(&["grid", "--k-max", "3", "--l-max", "2", "--format", "json"]);
    assert!(csv.status.success() && json.status.success());

    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&json)).unwrap();
    let csv_text = stdout(&csv);
    let csv_rows: Vec<Vec<&str>> = csv_text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), csv_rows.len());
    for (jrow, crow) in rows.iter().zip(&csv_rows) {
        for (idx, key) in [
            (2usize, "detuning_abs"),
            (3, "theta"),
            (4, "op_time"),
            (5, "period_slow"),
            (6, "period_fast"),
        ] {
            let from_csv: f64 = crow[idx].parse().unwrap();
            let from_json = jrow[key].as_f64().unwrap();
            assert_eq!(from_csv.to_bits(), from_json.to_bits(), "{key}");
        }
    }
}

#[test]
fn grid_physical_units() {
    let out = run(&[
        "grid",
        "--k-max",
        "1",
        "--l-max",
        "1",
        "--physical",
        "--g-mhz",
        "16",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let d_mhz: f64 = row[2].parse().unwrap();
    assert!((d_mhz - 26.128).abs() < 1e-2, "got {d_mhz}");
}

#[test]
fn evolve_lossless_norm_is_unity() {
    let out = run(&[
        "evolve",
        "--k",
        "1",
        "--l",
        "2",
        "--engine",
        "lossless",
        "--resolution",
        "50",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut last_fidelity = 0.0;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let norm: f64 = cols[10].parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-12);
        last_fidelity = cols[11].parse().unwrap();
    }
    // The trajectory ends at the operation time, where the pi pulse is
    // complete.
    assert!(last_fidelity > 1.0 - 1e-10);
}

#[test]
fn evolve_small_detuning_with_spontaneous_emission() {
    let out = run(&[
        "evolve",
        "--k",
        "1",
        "--l",
        "2",
        "--engine",
        "perturbative",
        "--kappa",
        "0.0015",
        "--gamma",
        "0.03",
        "--resolution",
        "200",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    let fidelity: f64 = cols[11].parse().unwrap();
    assert!(
        (fidelity - 0.9989).abs() < 5e-4,
        "final fidelity {fidelity}"
    );
}

#[test]
fn evolve_rejects_lossless_engine_with_damping() {
    let out = run(&[
        "evolve", "--k", "1", "--l", "2", "--engine", "lossless", "--kappa", "0.01",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reproduce_table1_passes() {
    let out = run(&["reproduce", "table1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().count() >= 14);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn reproduce_unknown_target_is_usage_error() {
    let out = run(&["reproduce", "fig99"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tune_time_emits_outcome_with_seeds() {
    let out = run(&["tune", "time", "--k", "31", "--l", "2", "--kappa", "0.01"]);
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record["procedure"], "time");
    let t = record["outcome"]["time"].as_f64().unwrap();
    let t0 = record["seeds"]["op_time_grid"].as_f64().unwrap();
    let tp = record["seeds"]["period_fast"].as_f64().unwrap();
    assert!(
        ((t - t0) / tp - 2.0).abs() < 0.25,
        "offset {}",
        (t - t0) / tp
    );
    let f = record["outcome"]["fidelity"].as_f64().unwrap();
    assert!((f - 0.9995).abs() < 5e-4);
    assert!(record["seeds"]["detuning_adjusted"].as_f64().unwrap() > 0.0);
}

#[test]
fn tune_detuning_matches_published_value() {
    let out = run(&[
        "tune", "detuning", "--k", "31", "--l", "2", "--kappa", "0.01",
    ]);
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d = record["outcome"]["detuning"].as_f64().unwrap();
    assert!((d - 5.2409).abs() < 5e-3, "detuning {d}");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = std::env::temp_dir().join(format!("raman_tuner_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "k = 31\nl = 2\nkappa = 0.01\n# comment\n").unwrap();

    let out = run(&["tune", "time", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((record["outcome"]["fidelity"].as_f64().unwrap() - 0.9995).abs() < 5e-3);

    // An explicit flag overrides the file value: kappa 0 keeps the grid time.
    let out2 = run(&[
        "tune",
        "time",
        "--config",
        cfg.to_str().unwrap(),
        "--kappa",
        "0",
    ]);
    assert!(out2.status.success());
    let record2: serde_json::Value = serde_json::from_str(&stdout(&out2)).unwrap();
    let t = record2["outcome"]["time"].as_f64().unwrap();
    let t0 = record2["seeds"]["op_time_grid"].as_f64().unwrap();
    assert!((t - t0).abs() < 1e-8);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn output_file_is_written() {
    let dir = std::env::temp_dir().join(format!("raman_tuner_out_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.csv");
    let out = run(&[
        "grid",
        "--k-max",
        "1",
        "--l-max",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("k,l,"));
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_mode_is_usage_error() {
    let out = run(&["evolve"]);
    assert_eq!(out.status.code(), Some(1));
    let out2 = run(&["tune", "nonsense", "--k", "1", "--l", "1"]);
    assert_eq!(out2.status.code(), Some(1));
}

#[test]
fn overdamped_is_numeric_failure() {
    let out = run(&[
        "evolve",
        "--k",
        "31",
        "--l",
        "2",
        "--engine",
        "adiabatic-full",
        "--kappa",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tune_pulse_finds_published_scale() {
    let out = run(&[
        "tune",
        "pulse",
        "--k",
        "3",
        "--l",
        "2",
        "--shape",
        "sine-square",
    ]);
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let scale = record["scale"].as_f64().unwrap();
    assert!((scale - 1.087).abs() < 5e-3, "scale {scale}");
    assert!(record["outcome"]["fidelity"].as_f64().unwrap() > 0.99999);
    assert!(record["seeds"]["pulse_seed_duration"].as_f64().unwrap() > 0.0);
}
