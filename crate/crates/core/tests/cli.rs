use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ghz_lbc::cli::parse_csv;

const CONFIG: &str = r#"{
  "n_qubits": 3,
  "state": { "alpha_re": 0.6, "beta_re": 0.0, "beta_im": 0.8, "pattern": "001" },
  "channels": [
    { "qubit": 1, "kind": "AD" },
    { "qubit": 2, "kind": "AD" },
    { "qubit": 3, "kind": "AD" }
  ],
  "grid": { "parameter": "p", "points": [0.0, 0.25, 0.5, 0.75, 1.0] },
  "methods": ["direct", "spectral", "factorized"]
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghz-lbc")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn evolve_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("nested/out.csv");
    let res = run(&["evolve", "--config", &cfg, "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let table = parse_csv(&text);
    assert_eq!(table.header, ["p", "lbc_direct", "lbc_spectral", "lbc_factorized", "condition", "max_deviation"]);
    for (p, lbc) in table.numbers("p").unwrap().into_iter().zip(table.numbers("lbc_direct").unwrap()) {
        let want = 2.0 * 0.48 * (1.0 - p.unwrap()).powf(1.5);
        assert!((lbc.unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn verify_reports_and_checks_golden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let json = dir.path().join("report.json");
    let res = run(&["verify", "--config", &cfg, "--out", s(&json)]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["scenario"], "AD_asymmetric");
    assert_eq!(report["summary"]["points"], 5);
    assert_eq!(report["summary"]["tolerance_violations"], 0);

    let golden = dir.path().join("golden.csv");
    assert_eq!(code(&run(&["evolve", "--config", &cfg, "--out", s(&golden)])), 0);
    let args = ["verify", "--config", &cfg, "--out", s(&json), "--golden", s(&golden)];
    assert_eq!(code(&run(&args)), 0);

    let text = fs::read_to_string(&golden).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cells: Vec<String> = lines[3].split(',').map(String::from).collect();
    cells[1] = "4.0000000000000000e-1".into();
    lines[3] = cells.join(",");
    fs::write(&golden, lines.join("\n") + "\n").unwrap();
    let res = run(&args);
    assert_eq!(code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stderr).contains("lbc_direct"));
}

#[test]
fn zero_tolerance_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let json = dir.path().join("report.json");
    let res = run(&["verify", "--config", &cfg, "--out", s(&json), "--tol", "0"]);
    assert_eq!(code(&res), 2);
    assert!(json.exists());
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let broken = write_config(dir.path(), "{ \"n_qubits\": 3,\n  \"state\": }");
    let res = run(&["evolve", "--config", &broken, "--out", s(&out)]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 2"));

    let unknown = write_config(dir.path(), &CONFIG.replacen("\"n_qubits\"", "\"qubits\": 3, \"n_qubits\"", 1));
    assert_eq!(code(&run(&["evolve", "--config", &unknown, "--out", s(&out)])), 1);

    let bad_norm = write_config(dir.path(), &CONFIG.replace("0.6", "0.7"));
    assert_eq!(code(&run(&["evolve", "--config", &bad_norm, "--out", s(&out)])), 1);

    let missing = dir.path().join("absent.json");
    assert_eq!(code(&run(&["evolve", "--config", s(&missing), "--out", s(&out)])), 1);
    assert_eq!(code(&run(&["preset", "--name", "fig9", "--outdir", s(dir.path())])), 1);
    assert_eq!(code(&run(&["preset", "--name", "fig1", "--grid", "1", "--outdir", s(dir.path())])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let res = run(&["evolve", "--config", &cfg, "--out", s(&blocker.join("out.csv"))]);
    assert_eq!(code(&res), 3);
}

#[test]
fn fig1_preset_follows_the_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["preset", "--name", "fig1", "--grid", "101", "--outdir", s(dir.path())]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(String::from_utf8_lossy(&res.stdout).lines().count(), 6);
    for m in 1..=5 {
        let table = parse_csv(&fs::read_to_string(dir.path().join(format!("fig1_M{m}.csv"))).unwrap());
        let p = table.numbers("p").unwrap();
        assert_eq!(p.len(), 101);
        for (p, lbc) in p.into_iter().zip(table.numbers("lbc_direct").unwrap()) {
            assert!((lbc.unwrap() - (1.0 - p.unwrap()).powf(m as f64 / 2.0)).abs() < 1e-12);
        }
        let spectral = table.numbers("lbc_spectral").unwrap();
        assert_eq!(spectral.iter().all(Option::is_some), m < 4, "spectral column for M={m}");
    }
    let combined = parse_csv(&fs::read_to_string(dir.path().join("fig1.csv")).unwrap());
    assert_eq!(combined.header, ["p", "M1", "M2", "M3", "M4", "M5"]);
}

#[test]
fn esd_preset_reports_threshold() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["preset", "--name", "esd", "--grid", "11", "--outdir", s(dir.path())])), 0);
    let table = parse_csv(&fs::read_to_string(dir.path().join("esd_threshold.csv")).unwrap());
    assert_eq!(table.rows[0][1], "none");
    let p_star = table.numbers("p_star_closed_form").unwrap()[1].unwrap();
    assert!((p_star - 0.5f64.powf(2.0 / 3.0)).abs() < 1e-6);
    let oracle = table.numbers("p_star_spectral").unwrap()[1].unwrap();
    assert!((oracle - p_star).abs() < 1e-4);
}
