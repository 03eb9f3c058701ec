//! Report formats and the suite runner used by the command-line tool.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::verify::VerificationReport;
use crate::{Error, Result};

mod suites;

pub use suites::run_suite;

pub const MANIFEST_VERSION: u32 = 1;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Gegenbauer,
    Gasper,
    Koornwinder,
    Laplace,
    Geometric,
    Biangle,
    Triangle,
    Selfadjoint,
    Eigenvalues,
    Bounds,
    Trace,
    KernelPositivity,
    KernelNegativityEll,
}

impl Suite {
    pub const VERIFY: [&'static str; 8] =
        ["gegenbauer", "gasper", "koornwinder", "laplace", "geometric", "biangle", "triangle", "selfadjoint"];
    pub const TABLE: [&'static str; 3] = ["eigenvalues", "bounds", "trace"];
    pub const SCAN: [&'static str; 2] = ["kernel-positivity", "kernel-negativity-ell"];

    pub fn parse(command: &str, kind: &str) -> Result<Self> {
        use Suite::*;
        let s = match (command, kind) {
            ("verify", "gegenbauer") => Gegenbauer,
            ("verify", "gasper") => Gasper,
            ("verify", "koornwinder") => Koornwinder,
            ("verify", "laplace") => Laplace,
            ("verify", "geometric") => Geometric,
            ("verify", "biangle") => Biangle,
            ("verify", "triangle") => Triangle,
            ("verify", "selfadjoint") => Selfadjoint,
            ("table", "eigenvalues") => Eigenvalues,
            ("table", "bounds") => Bounds,
            ("table", "trace") => Trace,
            ("scan", "kernel-positivity") => KernelPositivity,
            ("scan", "kernel-negativity-ell") => KernelNegativityEll,
            _ => return Err(Error::InvalidInput(format!("unknown suite '{command} {kind}'"))),
        };
        Ok(s)
    }

    /// Directory name, e.g. `verify-gasper`.
    pub fn name(&self) -> String {
        let kind = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        format!("{}-{kind}", self.command())
    }

    pub fn command(&self) -> &'static str {
        use Suite::*;
        match self {
            Eigenvalues | Bounds | Trace => "table",
            KernelPositivity | KernelNegativityEll => "scan",
            _ => "verify",
        }
    }
}

/// Everything that determines the numbers a suite produces, plus output plumbing.
///
/// Unset fields fall back to per-suite defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub ell: Option<usize>,
    pub a: Option<f64>,
    pub nmax: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub integrator: Option<String>,
    pub m: Option<usize>,
    pub n_particles: Option<usize>,
    pub samples: Option<usize>,
    pub p: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub deterministic_paths: bool,
}

impl SuiteConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("config file {}: {e}", path.display())))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(mut self, other: &SuiteConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(alpha, beta, gamma, ell, a, nmax, grid, tol, seed, integrator, m, n_particles, samples, p, threads, out);
        self.deterministic_paths |= other.deterministic_paths;
        self
    }

    pub fn validate(&self, suite: Suite) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::InvalidInput(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidInput("--threads must be at least 1".into()));
        }
        if let Some(i) = &self.integrator {
            if i != "tensor" && i != "qmc" {
                return Err(Error::InvalidInput(format!("integrator must be 'tensor' or 'qmc', got '{i}'")));
            }
        }
        if self.uses_sampling(suite) && self.seed.is_none() {
            return Err(Error::InvalidInput(format!("suite {} uses random sampling and needs --seed", suite.name())));
        }
        Ok(())
    }

    pub fn uses_sampling(&self, suite: Suite) -> bool {
        match suite {
            Suite::Geometric => true,
            Suite::Triangle => self.integrator.as_deref() == Some("qmc"),
            _ => false,
        }
    }

    /// SHA-256 over the canonical JSON of the numeric settings, in hex.
    pub fn hash(&self, suite: Suite) -> String {
        let canonical = SuiteConfig { threads: None, out: None, deterministic_paths: false, ..self.clone() };
        let text = serde_json::to_string(&(suite, canonical)).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn output_dir(&self, suite: Suite) -> PathBuf {
        let root = self.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
        let leaf = if self.deterministic_paths {
            self.hash(suite)[..16].to_string()
        } else {
            let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
            format!("{}-{:09}", t.as_secs(), t.subsec_nanos())
        };
        root.join(suite.name()).join(leaf)
    }
}

/// A CSV table: header plus rows, all joined with commas.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: String,
    pub rows: Vec<String>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(&self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOutput {
    pub reports: Vec<VerificationReport>,
    pub tables: Vec<Table>,
}

impl SuiteOutput {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn reports_csv(&self) -> String {
        let mut s = String::from(VerificationReport::csv_header());
        s.push('\n');
        for r in &self.reports {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub identity_id: String,
    pub pass: bool,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: u32,
    pub tool_version: String,
    pub suite: String,
    pub config_hash: String,
    pub config: SuiteConfig,
    pub reports: Vec<ManifestEntry>,
    pub all_pass: bool,
    pub error: Option<String>,
    pub exit_code: i32,
    pub files: Vec<String>,
    pub wall_clock_ms: f64,
}

/// Outcome of one command: where things went and the process exit code.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub dir: Option<PathBuf>,
    pub manifest: RunManifest,
    pub output: Option<SuiteOutput>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        self.manifest.exit_code
    }
}

/// Caps the global worker pool; only the first call has an effect.
pub fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Validates, runs and writes one suite. Writes a manifest even when the run fails.
pub fn execute(suite: Suite, cfg: &SuiteConfig) -> RunSummary {
    let start = Instant::now();
    let hash = cfg.hash(suite);
    let mut manifest = RunManifest {
        version: MANIFEST_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        suite: suite.name(),
        config_hash: hash,
        config: cfg.clone(),
        reports: vec![],
        all_pass: false,
        error: None,
        exit_code: 0,
        files: vec![],
        wall_clock_ms: 0.0,
    };
    let result = cfg.validate(suite).and_then(|_| {
        configure_threads(cfg.threads);
        run_suite(suite, cfg)
    });
    let dir = cfg.output_dir(suite);
    let output = match result {
        Ok(out) => {
            manifest.reports = out
                .reports
                .iter()
                .map(|r| ManifestEntry { identity_id: r.identity_id.clone(), pass: r.pass, runtime_ms: r.runtime_ms })
                .collect();
            manifest.all_pass = out.pass();
            manifest.exit_code = if out.pass() { 0 } else { 1 };
            Some(out)
        }
        Err(e) => {
            manifest.error = Some(e.to_string());
            manifest.exit_code = e.exit_code();
            None
        }
    };
    let written = write_outputs(&dir, output.as_ref(), &mut manifest, start);
    match written {
        Ok(()) => RunSummary { dir: Some(dir), manifest, output },
        Err(e) => {
            manifest.error.get_or_insert_with(|| format!("could not write outputs: {e}"));
            manifest.exit_code = manifest.exit_code.max(1);
            RunSummary { dir: None, manifest, output }
        }
    }
}

fn write_outputs(dir: &Path, output: Option<&SuiteOutput>, manifest: &mut RunManifest, start: Instant) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if let Some(out) = output {
        std::fs::write(dir.join("reports.csv"), out.reports_csv())?;
        manifest.files.push("reports.csv".into());
        std::fs::write(dir.join("reports.json"), serde_json::to_string_pretty(&out.reports)?)?;
        manifest.files.push("reports.json".into());
        for t in &out.tables {
            std::fs::write(dir.join(&t.file), t.to_csv())?;
            manifest.files.push(t.file.clone());
        }
    }
    manifest.wall_clock_ms = start.elapsed().as_secs_f64() * 1e3;
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(manifest)?)?;
    Ok(())
}
