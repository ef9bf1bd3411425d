use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dstirap-gate")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn c6_reports_blockade_ratio() {
    let o = run(&["c6"]);
    assert!(o.status.success());
    let line = stdout(&o).lines().find(|l| l.starts_with("V/Ωc")).map(str::to_owned).unwrap();
    let ratio: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((89.0..=99.0).contains(&ratio), "{ratio}");
}

#[test]
fn ideal_grover_three_qubits() {
    let o = run(&["grover", "--qubits", "3", "--ideal"]);
    assert!(o.status.success());
    let p: f64 = stdout(&o).trim().parse().unwrap();
    assert!((p - 0.9453).abs() < 1e-3);
}

#[test]
fn unknown_config_key_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[physics]\nomega_zero = 3\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "c6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("omega_zero"));
}

#[test]
fn sweep_writes_csv_and_reusable_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("amp.csv");
    let csv_s = csv.to_str().unwrap();
    let o = run(&["amplitudes", "--points", "2", "--min", "3", "--max", "4", "--total-time", "0.7", "-o", csv_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["omega_c_over_omega_0", "re_amplitude"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let amp: f64 = rows[0][1].parse().unwrap();
    assert!(amp > 0.95 && amp <= 1.0 + 1e-9);

    let manifest = dir.path().join("amp.manifest.toml");
    let text = std::fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("[manifest]") && text.contains("total_time_us = 0.7"));
    let again = dir.path().join("again.csv");
    let o = run(&[
        "--config",
        manifest.to_str().unwrap(),
        "amplitudes",
        "--points",
        "2",
        "--min",
        "3",
        "--max",
        "4",
        "-o",
        again.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), std::fs::read_to_string(&again).unwrap());
}
