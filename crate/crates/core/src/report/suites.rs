use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fmt_f64, Suite, SuiteConfig, SuiteOutput, Table};
use crate::bounds::{
    bound_table, kernel_positivity_scan, trace_class_diagnostic, BoundKind, DEFAULT_MAX_TERMS, DEFAULT_TERM_TOL,
};
use crate::operators::{markov_sequence, operator_matrix, OperatorSpec, SequenceSource};
use crate::simplex::{
    biangle_operator_selfadjoint, verify_biangle_product, verify_triangle_product, BianglePoint, TriangleIntegrator,
};
use crate::verify::{
    uniform_grid, verify_gasper_product, verify_gegenbauer, verify_geometric_form, verify_koornwinder, verify_laplace,
    verify_selfadjoint_symmetrized_form, ErrAcc, GeometricCase, VerificationReport,
};
use crate::{Error, Result};

const GEGENBAUER_GAMMAS: [f64; 4] = [0.6, 1.0, 1.5, 2.5];
const JACOBI_PAIRS: [(f64, f64); 4] = [(1.5, 0.5), (2.0, 0.0), (3.25, 0.75), (2.0, 0.5)];
const BOUND_A: [f64; 5] = [-0.9, -0.5, 0.0, 0.5, 0.9];

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteOutput> {
    use Suite::*;
    match suite {
        Gegenbauer => gegenbauer(cfg),
        Gasper | Koornwinder => gasper(cfg, suite == Koornwinder),
        Laplace => laplace(cfg),
        Geometric => geometric(cfg),
        Biangle => biangle(cfg),
        Triangle => triangle(cfg),
        Selfadjoint => selfadjoint(cfg),
        Eigenvalues => eigenvalues(cfg),
        Bounds => bounds(cfg),
        Trace => trace(cfg),
        KernelPositivity => kernel_scan(cfg, false),
        KernelNegativityEll => kernel_scan(cfg, true),
    }
}

fn reports(reports: Vec<VerificationReport>) -> SuiteOutput {
    SuiteOutput { reports, tables: vec![] }
}

fn symmetric_grid(cfg: &SuiteConfig, default: usize, half_width: f64) -> Result<Vec<f64>> {
    uniform_grid(-half_width, half_width, cfg.grid.unwrap_or(default))
}

/// Explicit (alpha, beta) if either is given, else the default parameter sets.
fn jacobi_pairs(cfg: &SuiteConfig) -> Vec<(f64, f64)> {
    match (cfg.alpha, cfg.beta) {
        (None, None) => JACOBI_PAIRS.to_vec(),
        (a, b) => vec![(a.unwrap_or(2.0), b.unwrap_or(0.5))],
    }
}

fn ells(cfg: &SuiteConfig) -> Vec<usize> {
    cfg.ell.map(|l| vec![l]).unwrap_or_else(|| (0..=3).collect())
}

fn gegenbauer(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let gammas = cfg.gamma.map(|g| vec![g]).unwrap_or_else(|| GEGENBAUER_GAMMAS.to_vec());
    let grid = symmetric_grid(cfg, 11, 0.9)?;
    let out = gammas
        .iter()
        .map(|&g| verify_gegenbauer(g, cfg.nmax.unwrap_or(20), &grid, &grid, cfg.tol.unwrap_or(1e-9)))
        .collect::<Result<_>>()?;
    Ok(reports(out))
}

fn gasper(cfg: &SuiteConfig, koornwinder: bool) -> Result<SuiteOutput> {
    let grid = symmetric_grid(cfg, 11, 0.9)?;
    let nmax = cfg.nmax.unwrap_or(12);
    let tol = cfg.tol.unwrap_or(1e-8);
    let mut out = vec![];
    for (alpha, beta) in jacobi_pairs(cfg) {
        for ell in ells(cfg) {
            out.push(if koornwinder {
                verify_koornwinder(alpha, beta, ell, nmax, &grid, tol, 1e-10)?
            } else {
                verify_gasper_product(alpha, beta, ell, nmax, &grid, &grid, tol)?
            });
        }
    }
    Ok(reports(out))
}

fn laplace(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let betas = cfg.beta.map(|b| vec![b]).unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.5]);
    let grid = uniform_grid(-1.5, 1.5, cfg.grid.unwrap_or(13))?;
    let out = betas
        .iter()
        .map(|&b| verify_laplace(b, cfg.nmax.unwrap_or(12), &grid, cfg.tol.unwrap_or(1e-9)))
        .collect::<Result<_>>()?;
    Ok(reports(out))
}

fn geometric(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let seed = cfg.seed.ok_or_else(|| Error::InvalidInput("geometric suite needs --seed".into()))?;
    let n = cfg.n_particles.unwrap_or(4);
    let cases = match cfg.m {
        Some(1) => vec![GeometricCase::Scalar { n }],
        Some(m) => vec![GeometricCase::Ball { m, n }],
        None => vec![GeometricCase::Scalar { n }, GeometricCase::Ball { m: 3, n }],
    };
    let samples = cfg.samples.unwrap_or(1_000_000);
    let a = cfg.a.unwrap_or(0.5);
    let out = cases.into_iter().map(|c| verify_geometric_form(c, a, samples, seed)).collect::<Result<_>>()?;
    Ok(reports(out))
}

/// Interior points in square-root coordinates: 0 < x1 < 1 and |x2| < x1, or 0 < x2 < x1.
fn random_points(rng: &mut ChaCha8Rng, count: usize, signed: bool) -> Vec<((f64, f64), (f64, f64))> {
    let pt = |rng: &mut ChaCha8Rng| {
        let x1 = rng.random_range(0.1..0.95);
        let s: f64 = if signed { rng.random_range(-0.95..0.95) } else { rng.random_range(0.05..0.95) };
        (x1, x1 * s)
    };
    (0..count).map(|_| (pt(rng), pt(rng))).collect()
}

fn biangle(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let (alpha, beta) = (cfg.alpha.unwrap_or(2.0), cfg.beta.unwrap_or(0.75));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(1));
    let pairs = random_points(&mut rng, 5, true);
    let nodes = cfg.grid.unwrap_or(24);
    let product = verify_biangle_product(alpha, beta, cfg.nmax.unwrap_or(6), &pairs, nodes, cfg.tol.unwrap_or(1e-6))?;
    let monomials: [&(dyn Fn(f64, f64) -> f64 + Sync); 7] = [
        &|_, _| 1.0,
        &|x, _| x,
        &|_, y| y,
        &|x, y| x * y,
        &|x, _| x * x,
        &|x, y| x * y * y,
        &|_, y| y.powi(4),
    ];
    let (y1, y2) = pairs[0].1;
    let y = BianglePoint::new(y1 * y1, y2)?;
    let symmetric = biangle_operator_selfadjoint(alpha, beta, &monomials, y, 16, 16, 1e-7)?;
    Ok(reports(vec![product, symmetric]))
}

fn triangle(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let (alpha, beta, gamma) = (cfg.alpha.unwrap_or(4.0), cfg.beta.unwrap_or(1.0), cfg.gamma.unwrap_or(0.5));
    let integrator = match cfg.integrator.as_deref().unwrap_or("tensor") {
        "qmc" => TriangleIntegrator::Qmc {
            points: cfg.samples.unwrap_or(1 << 16),
            replicates: 16,
            seed: cfg.seed.ok_or_else(|| Error::InvalidInput("qmc integrator needs --seed".into()))?,
        },
        _ => TriangleIntegrator::Tensor { nodes: cfg.grid.unwrap_or(12) },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(1));
    let out = random_points(&mut rng, 2, false)
        .into_iter()
        .map(|(x, y)| verify_triangle_product(alpha, beta, gamma, cfg.nmax.unwrap_or(3), x, y, integrator, cfg.tol.unwrap_or(1e-5)))
        .collect::<Result<_>>()?;
    Ok(reports(out))
}

fn selfadjoint(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let tests: [(&str, &dyn Fn(f64) -> f64); 4] =
        [("1+x", &|x| 1.0 + x), ("x^3-x", &|x| x * x * x - x), ("exp(x)", &|x: f64| x.exp()), ("1/(2-x)", &|x| 1.0 / (2.0 - x))];
    let a_values = cfg.a.map(|a| vec![a]).unwrap_or_else(|| vec![-0.5, 0.3, 0.8]);
    let mut out = vec![];
    for (alpha, beta) in jacobi_pairs(cfg) {
        for ell in ells(cfg) {
            for &a in &a_values {
                for i in 0..tests.len() {
                    for j in i + 1..tests.len() {
                        let mut r = verify_selfadjoint_symmetrized_form(
                            alpha,
                            beta,
                            ell,
                            a,
                            tests[i].1,
                            tests[j].1,
                            cfg.grid.unwrap_or(48),
                            cfg.tol.unwrap_or(1e-9),
                        )?;
                        r.grid = format!("{} h1={} h2={}", r.grid, tests[i].0, tests[j].0);
                        out.push(r);
                    }
                }
            }
        }
    }
    Ok(reports(out))
}

fn operator_spec(cfg: &SuiteConfig, alpha: f64, beta: f64, ell: usize, a: f64) -> OperatorSpec {
    match (cfg.gamma, ell) {
        (Some(gamma), _) if cfg.alpha.is_none() => OperatorSpec::UltrasphericalKa { gamma, a },
        (_, 0) => OperatorSpec::GasperKa0 { alpha, beta, a },
        _ => OperatorSpec::GeneralizedKal { alpha, beta, ell, a },
    }
}

fn single_spec(cfg: &SuiteConfig) -> OperatorSpec {
    operator_spec(cfg, cfg.alpha.unwrap_or(2.0), cfg.beta.unwrap_or(0.5), cfg.ell.unwrap_or(0), cfg.a.unwrap_or(0.5))
}

fn eigenvalues(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let spec = single_spec(cfg);
    let nmax = cfg.nmax.unwrap_or(20);
    let seq = markov_sequence(&spec, nmax, SequenceSource::Formula)?;
    let dim = (nmax + 1).min(16);
    let matrix = operator_matrix(&spec, dim)?;
    let diag = matrix.diagonal();
    let mut acc = ErrAcc::default();
    diag.iter().zip(&seq.lambdas).for_each(|(d, l)| acc.push(*l, *d));
    let table = Table {
        file: "eigenvalues.csv".into(),
        header: "n,lambda".into(),
        rows: seq.lambdas.iter().enumerate().map(|(n, l)| format!("{n},{}", fmt_f64(*l))).collect(),
    };
    let mut params = std::collections::BTreeMap::new();
    params.insert("a".into(), spec.a());
    params.insert("ell".into(), spec.ell() as f64);
    let tol = cfg.tol.unwrap_or(1e-8);
    let report = VerificationReport {
        identity_id: "eigenvalue_formula_vs_matrix".into(),
        params,
        grid: format!("{} dim {dim}", spec.describe()),
        max_abs_err: acc.max_abs,
        max_rel_err: acc.max_rel,
        tolerance: tol,
        pass: acc.max_abs <= tol,
        runtime_ms: 0.0,
        extra: Default::default(),
        notes: vec![seq.label],
    };
    Ok(SuiteOutput { reports: vec![report], tables: vec![table] })
}

fn bound_kinds(cfg: &SuiteConfig) -> Vec<BoundKind> {
    if let (Some(gamma), None) = (cfg.gamma, cfg.alpha) {
        return vec![BoundKind::Ultraspherical { gamma }];
    }
    if cfg.alpha.is_some() || cfg.beta.is_some() {
        let (alpha, beta) = jacobi_pairs(cfg)[0];
        return ells(cfg).into_iter().map(|ell| BoundKind::Jacobi { alpha, beta, ell }).collect();
    }
    let mut kinds: Vec<BoundKind> = GEGENBAUER_GAMMAS.iter().map(|&gamma| BoundKind::Ultraspherical { gamma }).collect();
    for (alpha, beta) in JACOBI_PAIRS {
        for ell in ells(cfg) {
            kinds.push(BoundKind::Jacobi { alpha, beta, ell });
        }
    }
    kinds
}

fn bounds(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let a_values = cfg.a.map(|a| vec![a]).unwrap_or_else(|| BOUND_A.to_vec());
    let nmax = cfg.nmax.unwrap_or(200);
    let mut rows = vec![];
    let mut out = vec![];
    for kind in bound_kinds(cfg) {
        for &a in &a_values {
            let start = std::time::Instant::now();
            let table = bound_table(kind, a, nmax)?;
            let worst = table.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
            let max_ratio = table.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
            for r in &table {
                rows.push(format!("{},{},{},{},{},{}", kind.label(), a, r.n, fmt_f64(r.lhs), fmt_f64(r.rhs), fmt_f64(r.slack)));
            }
            let mut params = std::collections::BTreeMap::new();
            params.insert("a".into(), a);
            params.insert("nmax".into(), nmax as f64);
            let violation = (-worst).max(0.0);
            out.push(VerificationReport {
                identity_id: "bound_dominance".into(),
                params,
                grid: kind.label(),
                max_abs_err: violation,
                max_rel_err: max_ratio,
                tolerance: 1e-12,
                pass: table.iter().all(|r| r.pass()),
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                extra: [("min_slack".to_string(), worst)].into_iter().collect(),
                notes: vec!["max_abs_err is the largest bound violation; max_rel_err the largest lhs/rhs".into()],
            });
        }
    }
    let table = Table { file: "bounds.csv".into(), header: "case,a,n,lhs,rhs,slack".into(), rows };
    Ok(SuiteOutput { reports: out, tables: vec![table] })
}

fn trace(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let spec = single_spec(cfg);
    let nmax = cfg.nmax.unwrap_or(4096);
    let threshold = trace_class_diagnostic(&spec, 1.0, nmax)?.threshold;
    let ps: Vec<f64> = match cfg.p {
        Some(p) => vec![p],
        None => [0.5, 0.9, 1.0, 1.1, 1.5, 2.0].iter().map(|f| f * threshold).collect(),
    };
    let mut rows = vec![];
    for p in ps {
        let d = trace_class_diagnostic(&spec, p, nmax)?;
        let boundary = (p - threshold).abs() <= 1e-12 * threshold;
        for (n, s) in &d.partial_sums {
            rows.push(format!(
                "{},{},{},{},{},{}",
                fmt_f64(p),
                boundary,
                d.above_threshold,
                d.looks_convergent,
                n,
                fmt_f64(*s)
            ));
        }
    }
    let table = Table {
        file: "trace.csv".into(),
        header: "p,boundary,above_threshold,looks_convergent,N,partial_sum".into(),
        rows,
    };
    Ok(SuiteOutput { reports: vec![], tables: vec![table] })
}

fn kernel_scan(cfg: &SuiteConfig, negativity: bool) -> Result<SuiteOutput> {
    let (alpha, beta) = (cfg.alpha.unwrap_or(2.0), cfg.beta.unwrap_or(0.5));
    let ell = cfg.ell.unwrap_or(if negativity { 1 } else { 0 });
    if negativity && ell == 0 {
        return Err(Error::InvalidInput("kernel-negativity-ell needs --ell >= 1".into()));
    }
    let grid = symmetric_grid(cfg, 21, 0.9)?;
    let eps = 1e-6;
    let term_tol = cfg.tol.unwrap_or(DEFAULT_TERM_TOL);
    let start = std::time::Instant::now();
    let scan = kernel_positivity_scan(alpha, beta, ell, &grid, term_tol, eps, DEFAULT_MAX_TERMS)?;
    let g = grid.len();
    let rows = scan
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{},{},{},{}", grid[i / (g * g)], grid[(i / g) % g], grid[i % g], fmt_f64(*v)))
        .collect();
    let mut params = std::collections::BTreeMap::new();
    params.insert("alpha".into(), alpha);
    params.insert("beta".into(), beta);
    params.insert("ell".into(), ell as f64);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("min_value".into(), scan.min_value);
    extra.insert("max_value".into(), scan.max_value);
    extra.insert("negative_count".into(), scan.negative_count as f64);
    extra.insert("unconverged".into(), scan.unconverged as f64);
    extra.insert("max_terms_used".into(), scan.max_terms_used as f64);
    let mut notes: Vec<String> = scan.warning.iter().cloned().collect();
    let [x, y, z] = scan.argmin;
    let (id, pass) = if negativity {
        notes.push(if scan.negative_count > 0 {
            format!("{} points below -{eps}; minimum {} at ({x};{y};{z})", scan.negative_count, scan.min_value)
        } else {
            "no negative stabilized value found".into()
        });
        ("kernel_negativity_search", scan.unconverged == 0)
    } else {
        ("kernel_positivity", scan.min_value >= -eps && scan.unconverged == 0)
    };
    if scan.unconverged > 0 {
        notes.push(format!("{} points did not converge", scan.unconverged));
    }
    let report = VerificationReport {
        identity_id: id.into(),
        params,
        grid: format!("{g}^3 pts in [{}:{}]", grid[0], grid[g - 1]),
        max_abs_err: (-scan.min_value).max(0.0),
        max_rel_err: 0.0,
        tolerance: eps,
        pass,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        extra,
        notes,
    };
    let table = Table { file: "kernel_scan.csv".into(), header: "x,y,z,value".into(), rows };
    Ok(SuiteOutput { reports: vec![report], tables: vec![table] })
}
