//! Partial sums of sum_n p_n(x) p_n(y) p_n(z) / p_n(1).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::orthopoly::{JacobiParams, Normalization, PolynomialFamily};
use crate::{Error, Result};

/// Terms are summed until this many consecutive ones are below the tolerance.
const WINDOW: usize = 32;
const MIN_TERMS: usize = 256;
const FIRST_PASS: usize = 4096;
pub const DEFAULT_TERM_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_TERMS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSumState {
    pub partial_sum: f64,
    pub terms: usize,
    pub last_term: f64,
    pub converged: bool,
    /// sum |t_n| over [64, 128) divided by the same over [128, 256)
    pub shrink_factor: f64,
    pub warning: Option<String>,
}

fn family(alpha: f64, beta: f64, ell: usize, n: usize) -> Result<PolynomialFamily<f64>> {
    PolynomialFamily::with_max_degree(JacobiParams::new(alpha, beta + ell as f64)?, Normalization::Orthonormal, n)
}

fn warning(alpha: f64) -> Option<String> {
    (alpha <= 0.5).then(|| format!("alpha = {alpha} <= 1/2: convergence of the series is not guaranteed"))
}

fn check(alpha: f64, beta: f64, pts: &[f64]) -> Result<()> {
    if !(alpha >= beta && beta > -0.5) {
        return Err(Error::Regime(format!("need alpha >= beta > -1/2, got ({alpha}, {beta})")));
    }
    if let Some(x) = pts.iter().find(|x| !(x.abs() < 1.0)) {
        return Err(Error::Domain(format!("kernel points must lie in (-1, 1), got {x}")));
    }
    Ok(())
}

/// Sums terms given by `term(n)` for n < available; returns None if more terms are needed.
fn sum_terms(available: usize, tol: f64, term: impl Fn(usize) -> f64) -> Option<(f64, usize, f64, f64)> {
    let mut sum = 0.0;
    let mut quiet = 0;
    let (mut b1, mut b2) = (0.0, 0.0);
    for n in 0..available {
        let t = term(n);
        sum += t;
        match n {
            64..=127 => b1 += t.abs(),
            128..=255 => b2 += t.abs(),
            _ => {}
        }
        quiet = if t.abs() < tol { quiet + 1 } else { 0 };
        if quiet >= WINDOW && n + 1 >= MIN_TERMS {
            let shrink = if b2 > 0.0 { b1 / b2 } else { f64::INFINITY };
            return Some((sum, n + 1, t.abs(), shrink));
        }
    }
    None
}

pub fn triple_sum_kernel(
    alpha: f64,
    beta: f64,
    ell: usize,
    x: f64,
    y: f64,
    z: f64,
    term_tol: f64,
    max_terms: usize,
) -> Result<KernelSumState> {
    check(alpha, beta, &[x, y, z])?;
    let mut n = FIRST_PASS.min(max_terms).max(MIN_TERMS);
    loop {
        let fam = family(alpha, beta, ell, n)?;
        let (px, py, pz, p1) =
            (fam.eval_upto(n, x)?, fam.eval_upto(n, y)?, fam.eval_upto(n, z)?, fam.eval_upto(n, 1.0)?);
        let term = |k: usize| px[k] * py[k] * pz[k] / p1[k];
        if let Some((partial_sum, terms, last_term, shrink_factor)) = sum_terms(n + 1, term_tol, term) {
            return Ok(KernelSumState { partial_sum, terms, last_term, converged: true, shrink_factor, warning: warning(alpha) });
        }
        if n >= max_terms {
            let partial_sum: f64 = (0..=n).map(term).sum();
            return Ok(KernelSumState {
                partial_sum,
                terms: n + 1,
                last_term: term(n).abs(),
                converged: false,
                shrink_factor: f64::NAN,
                warning: Some(format!("not converged after {} terms", n + 1)),
            });
        }
        n = (2 * n).min(max_terms);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelScan {
    pub alpha: f64,
    pub beta: f64,
    pub ell: usize,
    pub points: usize,
    pub min_value: f64,
    pub argmin: [f64; 3],
    pub max_value: f64,
    pub max_terms_used: usize,
    pub unconverged: usize,
    pub min_shrink_factor: f64,
    /// Points whose stabilized sum is below -eps (at most 32 kept).
    pub negative_points: Vec<([f64; 3], f64)>,
    pub negative_count: usize,
    pub eps: f64,
    pub warning: Option<String>,
    /// Stabilized sums in grid order (x slowest, z fastest).
    #[serde(skip)]
    pub values: Vec<f64>,
}

/// Evaluates the stabilized sum at every point of grid^3.
pub fn kernel_positivity_scan(
    alpha: f64,
    beta: f64,
    ell: usize,
    grid: &[f64],
    term_tol: f64,
    eps: f64,
    max_terms: usize,
) -> Result<KernelScan> {
    check(alpha, beta, grid)?;
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let g = grid.len();
    let all: Vec<[usize; 3]> =
        (0..g).flat_map(|i| (0..g).flat_map(move |j| (0..g).map(move |k| [i, j, k]))).collect();
    let mut pending = all.clone();
    let mut results: Vec<Option<(f64, usize, f64, bool)>> = vec![None; all.len()];
    let index = |p: &[usize; 3]| (p[0] * g + p[1]) * g + p[2];
    let mut n = FIRST_PASS.min(max_terms).max(MIN_TERMS);
    loop {
        let fam = family(alpha, beta, ell, n)?;
        let p1 = fam.eval_upto(n, 1.0)?;
        let vals: Vec<Vec<f64>> = grid.iter().map(|&x| fam.eval_upto(n, x)).collect::<Result<_>>()?;
        let ratio: Vec<Vec<f64>> = vals.iter().map(|v| v.iter().zip(&p1).map(|(a, b)| a / b).collect()).collect();
        let last = n >= max_terms;
        let done: Vec<([usize; 3], Option<(f64, usize, f64, bool)>)> = pending
            .par_iter()
            .map(|p| {
                let (a, b, c) = (&vals[p[0]], &vals[p[1]], &ratio[p[2]]);
                let term = |k: usize| a[k] * b[k] * c[k];
                match sum_terms(n + 1, term_tol, term) {
                    Some((s, used, _, shrink)) => (*p, Some((s, used, shrink, true))),
                    None if last => (*p, Some(((0..=n).map(term).sum(), n + 1, f64::NAN, false))),
                    None => (*p, None),
                }
            })
            .collect();
        pending.clear();
        for (p, r) in done {
            match r {
                Some(r) => results[index(&p)] = Some(r),
                None => pending.push(p),
            }
        }
        if pending.is_empty() {
            break;
        }
        n = (2 * n).min(max_terms);
    }

    let mut scan = KernelScan {
        alpha,
        beta,
        ell,
        points: all.len(),
        min_value: f64::INFINITY,
        argmin: [0.0; 3],
        max_value: f64::NEG_INFINITY,
        max_terms_used: 0,
        unconverged: 0,
        min_shrink_factor: f64::INFINITY,
        negative_points: vec![],
        negative_count: 0,
        eps,
        warning: warning(alpha),
        values: Vec::with_capacity(all.len()),
    };
    for p in &all {
        let (s, used, shrink, ok) = results[index(p)].expect("every point resolved");
        scan.values.push(s);
        let pt = [grid[p[0]], grid[p[1]], grid[p[2]]];
        if s < scan.min_value {
            scan.min_value = s;
            scan.argmin = pt;
        }
        scan.max_value = scan.max_value.max(s);
        scan.max_terms_used = scan.max_terms_used.max(used);
        if !ok {
            scan.unconverged += 1;
        } else {
            scan.min_shrink_factor = scan.min_shrink_factor.min(shrink);
        }
        if s < -eps {
            scan.negative_count += 1;
            if scan.negative_points.len() < 32 {
                scan.negative_points.push((pt, s));
            }
        }
    }
    Ok(scan)
}
