use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jacobi_markov::report::{execute, Suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "jacobi-markov", version, about = "Verification suites, bound tables and kernel scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a product formula or integral identity.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::VERIFY))]
        suite: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Write eigenvalue, bound or trace tables.
    Table {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::TABLE))]
        kind: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Scan the triple-sum kernel on a cube grid.
    Scan {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::SCAN))]
        kind: String,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Points per grid axis (quadrature nodes per axis for the simplex suites).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// tensor or qmc (triangle suite).
    #[arg(long)]
    integrator: Option<String>,
    /// Root directory for reports (default ./reports).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Name the run directory by config hash instead of timestamp.
    #[arg(long)]
    deterministic_paths: bool,
    /// Block dimension for the geometric suite (1 = scalar case).
    #[arg(long)]
    m: Option<usize>,
    /// Number of particles N for the geometric suite.
    #[arg(long)]
    n_particles: Option<usize>,
    /// Monte Carlo samples, or QMC points per replicate.
    #[arg(long)]
    samples: Option<usize>,
    /// Exponent for the trace table.
    #[arg(long)]
    p: Option<f64>,
    /// JSON file with the same fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Opts {
    fn to_config(&self) -> SuiteConfig {
        SuiteConfig {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            ell: self.ell,
            a: self.a,
            nmax: self.nmax,
            grid: self.grid,
            tol: self.tol,
            seed: self.seed,
            integrator: self.integrator.clone(),
            m: self.m,
            n_particles: self.n_particles,
            samples: self.samples,
            p: self.p,
            threads: self.threads,
            out: self.out.clone(),
            deterministic_paths: self.deterministic_paths,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, kind, opts) = match &cli.command {
        Command::Verify { suite, opts } => ("verify", suite, opts),
        Command::Table { kind, opts } => ("table", kind, opts),
        Command::Scan { kind, opts } => ("scan", kind, opts),
    };
    let suite = match Suite::parse(command, kind) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let flags = opts.to_config();
    let cfg = match &opts.config {
        Some(path) => match SuiteConfig::from_json_file(path) {
            Ok(base) => base.overlay(&flags),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => flags,
    };
    let summary = execute(suite, &cfg);
    if let Some(out) = &summary.output {
        for r in &out.reports {
            println!(
                "{:<6} {:<32} err={:.3e} tol={:.1e} {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.identity_id,
                r.max_abs_err,
                r.tolerance,
                r.grid
            );
        }
    }
    if let Some(e) = &summary.manifest.error {
        eprintln!("error: {e}");
    }
    if let Some(dir) = &summary.dir {
        println!("wrote {}", dir.display());
    }
    ExitCode::from(summary.exit_code() as u8)
}
