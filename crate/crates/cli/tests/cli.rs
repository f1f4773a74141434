use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stokes-mg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_rows(path: &Path) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.deserialize().map(|row| row.unwrap()).collect()
}

fn find<'a>(rows: &'a [HashMap<String, String>], cycle: &str, n: &str, nu: &str) -> &'a HashMap<String, String> {
    rows.iter()
        .find(|r| r["cycle"] == cycle && r["n"] == n && r["nu"] == nu)
        .unwrap_or_else(|| panic!("no row {cycle} n={n} nu={nu}"))
}

fn rho(row: &HashMap<String, String>) -> f64 {
    row["rho"].parse().unwrap()
}

#[test]
fn table1_preset_two_grid_row() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t1.csv");
    let o = run(&["tables", "--preset", "table1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 16);
    let r = rho(find(&rows, "twogrid", "32", "1"));
    assert!((0.308..=0.348).contains(&r), "{r}");
    assert!(rows.iter().all(|r| r["status"] == "ok" && r["k_eff"] == "100"));
    assert!(stdout(&o).contains("table1-V"));
}

#[test]
fn table3_preset_w_cycle_row() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t3.csv");
    let o = run(&["tables", "--preset", "table3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&out);
    let r = rho(find(&rows, "W", "128", "2"));
    assert!((0.291..=0.351).contains(&r), "{r}");
    let pred: f64 = find(&rows, "W", "128", "2")["lfa_prediction"].parse().unwrap();
    assert!((pred - 1.0 / 3.0).abs() < 1e-6, "{pred}");
}

const SMALL: &str = r#"
seed = 11
kmax = 30
resolution = 64

[[experiment]]
name = "small"
scheme = "q-ibsr"
grids = [16, 32]
cycles = ["twogrid", "W"]
nu = [1, 2]
"#;

fn strip_wall_time(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "wall_time_s").unwrap();
    let mut all = vec![header.iter().map(String::from).collect::<Vec<_>>()];
    for rec in r.records() {
        all.push(rec.unwrap().iter().enumerate().filter(|(i, _)| *i != col).map(|(_, s)| s.to_string()).collect());
    }
    all
}

#[test]
fn same_config_same_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = run(&["tables", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (ra, rb) = (strip_wall_time(&a), strip_wall_time(&b));
    assert_eq!(ra.len(), 9);
    assert_eq!(ra, rb);

    // a different seed changes the seed column and the measured values
    let c = dir.path().join("c.csv");
    let o = run(&["tables", "--config", cfg.to_str().unwrap(), "--seed", "12", "--out", c.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_ne!(strip_wall_time(&c), ra);
}

#[test]
fn empty_grid_list_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, SMALL.replace("grids = [16, 32]", "grids = []")).unwrap();
    let o = run(&["tables", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("grids"), "{}", stderr(&o));
}

#[test]
fn malformed_invocations_exit_with_one() {
    assert_eq!(code(&run(&["tables"])), 1);
    assert_eq!(code(&run(&["tables", "--preset", "table7"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["solve", "--scheme", "jacobi"])), 1);
    assert_eq!(code(&run(&["verify", "--criterion", "13"])), 1);
    assert_eq!(code(&run(&["lfa-scan", "--resolution", "31"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn divergence_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("div.toml");
    std::fs::write(&cfg, SMALL.replace("scheme = \"q-ibsr\"", "scheme = \"q-dr\"\nparams = { omega = 3.0 }")).unwrap();
    let out = dir.path().join("div.csv");
    let o = run(&["tables", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let rows = read_rows(&out);
    assert!(rows.iter().all(|r| r["status"] == "diverged" && r["rho"].is_empty()));

    let o = run(&["solve", "--scheme", "q-dr", "--omega", "3.0", "--n", "16"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn lfa_scan_reports_optimal_uzawa_factors() {
    let dir = TempDir::new().unwrap();
    for (scheme, expected) in [("q-uzawa", (1.0f64 / 3.0).sqrt()), ("diag-uzawa", 0.6f64.sqrt())] {
        let out = dir.path().join(format!("{scheme}.csv"));
        let o = run(&["lfa-scan", "--scheme", scheme, "--resolution", "64", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let rows = read_rows(&out);
        let mu: f64 = rows[0]["mu"].parse().unwrap();
        let exp: f64 = rows[0]["expected"].parse().unwrap();
        assert!((exp - expected).abs() < 1e-12);
        assert!((mu - expected).abs() < 5e-3, "{scheme}: {mu}");
    }
}

#[test]
fn lfa_scan_reads_scan_sections() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(&cfg, "resolution = 64\n\n[[scan]]\nscheme = \"q-dr\"\nomega = [0.5, 1.0, 0.01]\n").unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(&["lfa-scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 1);
    let omega: f64 = rows[0]["omega"].parse().unwrap();
    assert!((omega - 0.75).abs() < 1e-9, "{omega}");
    assert_eq!(rows[0]["evaluations"], "51");
}

#[test]
fn verify_flags_a_detuned_qdr_damping() {
    let o = run(&["verify", "--criterion", "1", "--omega", "0.9"]);
    assert_eq!(code(&o), 2);
    let s = stdout(&o);
    assert!(s.contains("[FAIL]") && s.contains("0.600000"), "{s}");
}

#[test]
fn verify_with_shifted_transfers_keeps_adjointness_but_drifts() {
    let o = run(&["verify", "--criterion", "9", "--transfer", "shifted"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["verify", "--criterion", "4", "--transfer", "shifted"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("FAIL q-dr twogrid h=1/32 nu=1"));
}

#[test]
fn verify_default_subset_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("verify.csv");
    let o = run(&["verify", "--criterion", "3", "--criterion", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["passed"] == "true"));
}

#[test]
fn solve_converges_and_writes_history() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("history.csv");
    let o = run(&["solve", "--scheme", "q-uzawa", "--cycle", "W", "--n", "32", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_rows(&out);
    let last: f64 = rows.last().unwrap()["relative_defect"].parse().unwrap();
    assert!(last <= 1e-10);
    assert!(rows.len() < 40, "{}", rows.len());
    assert!(stdout(&o).contains("relative error"));
}
