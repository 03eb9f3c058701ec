use jacobi_markov::report::{execute, fmt_f64, RunManifest, Suite, SuiteConfig};

fn cfg(out: &std::path::Path) -> SuiteConfig {
    SuiteConfig { out: Some(out.to_path_buf()), deterministic_paths: true, ..Default::default() }
}

#[test]
fn suite_names_round_trip() {
    for (cmd, kinds) in [("verify", &Suite::VERIFY[..]), ("table", &Suite::TABLE[..]), ("scan", &Suite::SCAN[..])] {
        for k in kinds {
            let s = Suite::parse(cmd, k).unwrap();
            assert_eq!(s.name(), format!("{cmd}-{k}"));
        }
    }
    assert!(Suite::parse("verify", "eigenvalues").is_err());
}

#[test]
fn hash_ignores_output_plumbing() {
    let a = SuiteConfig { gamma: Some(1.0), ..Default::default() };
    let b = SuiteConfig { out: Some("/elsewhere".into()), threads: Some(3), deterministic_paths: true, ..a.clone() };
    assert_eq!(a.hash(Suite::Gegenbauer), b.hash(Suite::Gegenbauer));
    assert_ne!(a.hash(Suite::Gegenbauer), a.hash(Suite::Laplace));
    let c = SuiteConfig { gamma: Some(1.5), ..Default::default() };
    assert_ne!(a.hash(Suite::Gegenbauer), c.hash(Suite::Gegenbauer));
}

#[test]
fn overlay_prefers_flags() {
    let file = SuiteConfig { alpha: Some(3.0), beta: Some(0.5), ..Default::default() };
    let flags = SuiteConfig { alpha: Some(2.0), ..Default::default() };
    let merged = file.overlay(&flags);
    assert_eq!((merged.alpha, merged.beta), (Some(2.0), Some(0.5)));
}

#[test]
fn validation_rules() {
    let base = SuiteConfig::default();
    assert!(base.validate(Suite::Geometric).is_err());
    assert!(SuiteConfig { seed: Some(1), ..base.clone() }.validate(Suite::Geometric).is_ok());
    let qmc = SuiteConfig { integrator: Some("qmc".into()), ..base.clone() };
    assert!(qmc.validate(Suite::Triangle).is_err());
    assert!(SuiteConfig { integrator: Some("simpson".into()), ..base.clone() }.validate(Suite::Triangle).is_err());
    assert!(SuiteConfig { tol: Some(0.0), ..base.clone() }.validate(Suite::Gegenbauer).is_err());
    assert!(base.validate(Suite::Triangle).is_ok());
}

#[test]
fn execute_writes_reports_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let c = SuiteConfig { gamma: Some(1.0), nmax: Some(10), grid: Some(5), ..cfg(dir.path()) };
    let run = execute(Suite::Gegenbauer, &c);
    assert_eq!(run.exit_code(), 0);
    let out = run.dir.unwrap();
    assert!(out.ends_with(format!("verify-gegenbauer/{}", &c.hash(Suite::Gegenbauer)[..16])));
    let csv = std::fs::read_to_string(out.join("reports.csv")).unwrap();
    assert!(csv.starts_with("identity_id,params,grid,max_abs_err,max_rel_err,tolerance,pass\n"));
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert!(m.all_pass && m.version == 1 && m.reports.len() == 1);
}

#[test]
fn failures_still_write_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SuiteConfig { alpha: Some(0.4), beta: Some(0.5), ..cfg(dir.path()) };
    let run = execute(Suite::Gasper, &bad);
    assert_eq!(run.exit_code(), 2);
    let m: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(run.dir.unwrap().join("manifest.json")).unwrap()).unwrap();
    assert!(m.error.unwrap().contains("regime"));
    // a tolerance nothing can meet is a numerical failure
    let strict = SuiteConfig { gamma: Some(1.0), nmax: Some(10), grid: Some(3), tol: Some(1e-300), ..cfg(dir.path()) };
    assert_eq!(execute(Suite::Gegenbauer, &strict).exit_code(), 1);
}

#[test]
fn tables_have_fixed_headers() {
    let dir = tempfile::tempdir().unwrap();
    let c = SuiteConfig { gamma: Some(1.0), a: Some(0.5), nmax: Some(20), ..cfg(dir.path()) };
    let run = execute(Suite::Bounds, &c);
    assert_eq!(run.exit_code(), 0);
    let csv = std::fs::read_to_string(run.dir.unwrap().join("bounds.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("case,a,n,lhs,rhs,slack"));
    assert_eq!(lines.count(), 20);

    let run = execute(Suite::Eigenvalues, &SuiteConfig { nmax: Some(5), ..cfg(dir.path()) });
    let csv = std::fs::read_to_string(run.dir.unwrap().join("eigenvalues.csv")).unwrap();
    assert!(csv.starts_with("n,lambda\n0,1.0000000000000000e0\n"));

    let run = execute(Suite::Trace, &SuiteConfig { gamma: Some(1.0), a: Some(0.0), nmax: Some(64), ..cfg(dir.path()) });
    let csv = std::fs::read_to_string(run.dir.unwrap().join("trace.csv")).unwrap();
    let boundary: Vec<&str> = csv.lines().filter(|l| l.split(',').nth(1) == Some("true")).collect();
    assert!(!boundary.is_empty() && boundary.iter().all(|l| l.starts_with(&fmt_f64(1.0))));
}

#[test]
fn empty_scan_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(execute(Suite::KernelPositivity, &SuiteConfig { grid: Some(0), ..cfg(dir.path()) }).exit_code(), 2);
}
