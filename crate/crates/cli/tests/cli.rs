use std::path::{Path, PathBuf};
use std::process::Command;

fn run(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_jacobi-markov"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--deterministic-paths")
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr))
}

fn run_dir(out: &Path, suite: &str) -> PathBuf {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(out.join(suite)).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1);
    dirs.pop().unwrap()
}

#[test]
fn gegenbauer_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, text) = run(&["verify", "gegenbauer", "--gamma", "1", "--nmax", "20"], tmp.path());
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("PASS"));
}

#[test]
fn regime_violation_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, text) = run(&["verify", "gasper", "--alpha", "0.4", "--beta", "0.5"], tmp.path());
    assert_eq!(code, 2, "{text}");
    assert!(run_dir(tmp.path(), "verify-gasper").join("manifest.json").exists());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "geometric"], tmp.path()).0, 2);
    assert_eq!(run(&["scan", "kernel-positivity", "--grid", "0"], tmp.path()).0, 2);
    assert_eq!(run(&["verify", "nonsense"], tmp.path()).0, 2);
    assert_eq!(run(&["verify", "triangle", "--integrator", "qmc"], tmp.path()).0, 2);
}

#[test]
fn numerical_failure_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, text) = run(&["verify", "gegenbauer", "--gamma", "1", "--nmax", "8", "--grid", "3", "--tol", "1e-300"], tmp.path());
    assert_eq!(code, 1, "{text}");
}

#[test]
fn triangle_qmc_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["verify", "triangle", "--integrator", "qmc", "--seed", "7", "--samples", "2048"];
    let (code, text) = run(&args, tmp.path());
    assert_eq!(code, 0, "{text}");
    let dir = run_dir(tmp.path(), "verify-triangle");
    let first = std::fs::read(dir.join("reports.csv")).unwrap();
    assert_eq!(run(&args, tmp.path()).0, 0);
    assert_eq!(first, std::fs::read(dir.join("reports.csv")).unwrap());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("cfg.json");
    std::fs::write(&file, r#"{"gamma": 1.5, "nmax": 3, "grid": 3}"#).unwrap();
    let (code, text) = run(&["verify", "gegenbauer", "--config", file.to_str().unwrap(), "--nmax", "5"], tmp.path());
    assert_eq!(code, 0, "{text}");
    let csv = std::fs::read_to_string(run_dir(tmp.path(), "verify-gegenbauer").join("reports.csv")).unwrap();
    assert!(csv.contains("gamma=1.5;n_max=5"), "{csv}");
    std::fs::write(&file, r#"{"gama": 1.5}"#).unwrap();
    assert_eq!(run(&["verify", "gegenbauer", "--config", file.to_str().unwrap()], tmp.path()).0, 2);
}

#[test]
fn kernel_scan_writes_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, text) = run(&["scan", "kernel-positivity", "--grid", "5"], tmp.path());
    assert_eq!(code, 0, "{text}");
    let csv = std::fs::read_to_string(run_dir(tmp.path(), "scan-kernel-positivity").join("kernel_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 126);
}
