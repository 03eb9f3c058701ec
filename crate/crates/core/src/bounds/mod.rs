//! Eigenvalue decay bounds, superlevel-set measures, trace diagnostics,
//! the uniform bound on weighted orthonormal polynomials, and kernel series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::orthopoly::{JacobiParams, Normalization, PolynomialFamily};
use crate::quadrature::unit_interval_rule;
use crate::special::{beta_fn, c_alpha_beta, c_gamma, gamma, inc_beta, ln_gamma};
use crate::verify::{ErrAcc, VerificationReport};
use crate::{Error, Result};

mod kernel;

pub use kernel::{
    kernel_positivity_scan, triple_sum_kernel, KernelScan, KernelSumState, DEFAULT_MAX_TERMS, DEFAULT_TERM_TOL,
};

/// Slack below this counts as a violation.
pub const SLACK_TOL: f64 = -1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl BoundResult {
    pub fn new(n: usize, lhs: f64, rhs: f64) -> Self {
        Self { n, lhs, rhs, slack: rhs - lhs }
    }

    pub fn pass(&self) -> bool {
        self.slack >= SLACK_TOL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoundKind {
    /// |P_n^{(gamma)}(a)| against 2 c (1-a^2)^{-gamma} (n/2)^{-gamma}.
    Ultraspherical { gamma: f64 },
    /// |p_n^{(alpha, beta+l)}(a) / p_n(1)| against the K_{alpha,beta}(a) bound.
    Jacobi { alpha: f64, beta: f64, ell: usize },
}

impl BoundKind {
    pub fn label(&self) -> String {
        match self {
            BoundKind::Ultraspherical { gamma } => format!("ultraspherical(gamma={gamma})"),
            BoundKind::Jacobi { alpha, beta, ell } => format!("jacobi(alpha={alpha};beta={beta};ell={ell})"),
        }
    }
}

fn open_a(a: f64) -> Result<()> {
    if !(a.abs() < 1.0) {
        return Err(Error::Domain(format!("bound degenerates at |a| >= 1 (a = {a})")));
    }
    Ok(())
}

fn positive_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("bounds are stated for n >= 1".into()));
    }
    Ok(())
}

pub fn ultraspherical_bound(gamma: f64, a: f64, n: usize) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::ParameterDomain(format!("need gamma > 0, got {gamma}")));
    }
    open_a(a)?;
    positive_n(n)?;
    Ok(2.0 * c_gamma(gamma - 0.5) * (1.0 - a * a).powf(-gamma) * (n as f64 / 2.0).powf(-gamma))
}

/// K_{alpha,beta}(a), the constant in the superlevel-set bound.
pub fn jacobi_set_constant(alpha: f64, beta: f64, a: f64) -> Result<f64> {
    strict(alpha, beta)?;
    open_a(a)?;
    Ok(c_alpha_beta(alpha, beta) / std::f64::consts::PI
        * 2f64.powf(2.0 * (alpha - beta + 2.0))
        * (1.0 - a).powf(-(2.0 * alpha - beta + 1.0))
        * (1.0 + a).powf(-(beta + 0.5)))
}

pub fn jacobi_bound(alpha: f64, beta: f64, ell: usize, a: f64, n: usize) -> Result<f64> {
    positive_n(n)?;
    let k = jacobi_set_constant(alpha, beta, a)?;
    let bracket = (1.0 + ((1.0 - a) / (1.0 + a)).sqrt()).powi(ell as i32);
    Ok(bracket * k * gamma(alpha + 1.5) * (n as f64 / 2.0).powf(-(alpha + 0.5)))
}

fn strict(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > beta && beta > -0.5) {
        return Err(Error::Regime(format!("need alpha > beta > -1/2, got ({alpha}, {beta})")));
    }
    Ok(())
}

/// Bound rows for n in n_range (n = 0 is skipped).
pub fn bound_table(kind: BoundKind, a: f64, n_max: usize) -> Result<Vec<BoundResult>> {
    open_a(a)?;
    let (fam, bound): (PolynomialFamily<f64>, Box<dyn Fn(usize) -> Result<f64>>) = match kind {
        BoundKind::Ultraspherical { gamma } => (
            PolynomialFamily::with_max_degree(JacobiParams::ultraspherical(gamma)?, Normalization::ValueOneAtOne, n_max)?,
            Box::new(move |n| ultraspherical_bound(gamma, a, n)),
        ),
        BoundKind::Jacobi { alpha, beta, ell } => {
            strict(alpha, beta)?;
            (
                PolynomialFamily::with_max_degree(
                    JacobiParams::new(alpha, beta + ell as f64)?,
                    Normalization::ValueOneAtOne,
                    n_max,
                )?,
                Box::new(move |n| jacobi_bound(alpha, beta, ell, a, n)),
            )
        }
    };
    let vals = fam.eval_upto(n_max, a)?;
    (1..=n_max).map(|n| Ok(BoundResult::new(n, vals[n].abs(), bound(n)?))).collect()
}

/// |P_{2n}^{(gamma)}(0)| in closed form.
pub fn ultraspherical_even_at_zero(gamma: f64, n: usize) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::ParameterDomain(format!("need gamma > 0, got {gamma}")));
    }
    let nf = n as f64;
    let ln = ln_gamma(nf + 0.5) + ln_gamma(gamma) - ln_gamma(nf + gamma + 0.5);
    Ok(c_gamma(gamma - 0.5) * ln.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SetKind {
    /// {s : (1 - t^2)(1 - s^2) <= lambda} under mu^{(gamma - 1/2)}
    Ultraspherical { gamma: f64, t: f64 },
    /// {(r, theta) : R^2 > 1 - lambda} under the disk measure m_{alpha,beta}
    Jacobi { alpha: f64, beta: f64, a: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetMeasure {
    pub lambda: f64,
    pub measured: f64,
    pub bound: f64,
}

impl SetMeasure {
    pub fn pass(&self) -> bool {
        self.measured <= self.bound + 1e-10
    }
}

const SET_NODES: usize = 160;

pub fn c_lambda_measure(kind: SetKind, lambda: f64) -> Result<SetMeasure> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidInput(format!("need 0 < lambda < 1, got {lambda}")));
    }
    match kind {
        SetKind::Ultraspherical { gamma, t } => {
            if !(gamma > 0.0) {
                return Err(Error::ParameterDomain(format!("need gamma > 0, got {gamma}")));
            }
            open_a(t)?;
            let scaled = lambda / (1.0 - t * t);
            let bound = 2.0 * c_gamma(gamma - 0.5) * scaled.powf(gamma);
            let measured = if scaled >= 1.0 {
                1.0
            } else {
                // v = 1 - s^2 has density v^(gamma-1) (1-v)^(-1/2) / B(gamma, 1/2); v = scaled * x
                let rule = unit_interval_rule(0.0, gamma - 1.0, SET_NODES)?;
                let sum: f64 = rule.pairs().map(|(x, w)| w * (1.0 - scaled * x).powf(-0.5)).sum();
                sum * scaled.powf(gamma) / gamma / beta_fn(gamma, 0.5)
            };
            Ok(SetMeasure { lambda, measured, bound })
        }
        SetKind::Jacobi { alpha, beta, a } => {
            let bound = jacobi_set_constant(alpha, beta, a)? * lambda.powf(alpha + 0.5);
            Ok(SetMeasure { lambda, measured: jacobi_set_measure(alpha, beta, a, lambda)?, bound })
        }
    }
}

/// m_{alpha,beta}{R^2 > 1 - lambda} with R^2 = A^2 + B^2 u^2 + 2AB u cos(2 theta), u = r^2.
fn jacobi_set_measure(alpha: f64, beta: f64, a: f64, lambda: f64) -> Result<f64> {
    let big_a = (1.0 + a) / 2.0;
    let big_b = (1.0 - a) / 2.0;
    let kappa = alpha - beta;
    // u ~ Beta(beta + 1, alpha - beta) under the disk measure
    let prob_u_set = |theta: f64| -> f64 {
        let c2 = (2.0 * theta).cos();
        let (qa, qb, qc) = (big_b * big_b, 2.0 * big_a * big_b * c2, big_a * big_a - 1.0 + lambda);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            return 1.0;
        }
        let sq = disc.sqrt();
        let (lo, hi) = ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa));
        let cdf = |u: f64| inc_beta(beta + 1.0, kappa, u.clamp(0.0, 1.0));
        cdf(lo) + 1.0 - cdf(hi)
    };
    // on u = 1 the set is sin^2(theta) < lambda / (4AB); for larger u-ranges the
    // quadratic is convex, so this is the whole theta-support unless A^2 > 1 - lambda
    let s2 = lambda / (4.0 * big_a * big_b);
    let theta_max = if s2 >= 1.0 || big_a * big_a > 1.0 - lambda {
        std::f64::consts::FRAC_PI_2
    } else {
        s2.sqrt().asin()
    };
    let edge = if theta_max < std::f64::consts::FRAC_PI_2 { kappa } else { 0.0 };
    let rule = unit_interval_rule(edge, 2.0 * beta, SET_NODES)?;
    let mut sum = 0.0;
    for (x, w) in rule.pairs() {
        let theta = theta_max * x;
        let sinc = if theta > 0.0 { theta.sin() / theta } else { 1.0 };
        sum += w * prob_u_set(theta) * sinc.powf(2.0 * beta) / (1.0 - x).powf(edge);
    }
    let mass = beta_fn(edge + 1.0, 2.0 * beta + 1.0) * theta_max.powf(2.0 * beta + 1.0);
    // theta and pi - theta contribute equally; sin^(2 beta) has total mass B(1/2, beta + 1/2)
    Ok(2.0 * sum * mass / beta_fn(0.5, beta + 0.5))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDiagnostic {
    pub p: f64,
    /// (N, sum_{n <= N} |lambda_n|^p) at N = 2^k - 1 and at n_max
    pub partial_sums: Vec<(usize, f64)>,
    /// Ratios of consecutive dyadic block sums.
    pub block_ratios: Vec<f64>,
    pub looks_convergent: bool,
    /// p above the decay threshold 1/gamma or 1/(alpha + 1/2).
    pub above_threshold: bool,
    pub threshold: f64,
    pub label: String,
}

/// Dyadic block test on partial sums of |lambda_n|^p; heuristic only.
pub fn trace_class_diagnostic(spec: &crate::operators::OperatorSpec, p: f64, n_max: usize) -> Result<TraceDiagnostic> {
    use crate::operators::OperatorSpec::*;
    if !(p > 0.0) {
        return Err(Error::InvalidInput(format!("need p > 0, got {p}")));
    }
    if n_max < 8 {
        return Err(Error::InvalidInput("trace diagnostic needs n_max >= 8".into()));
    }
    spec.validate()?;
    let threshold = match *spec {
        UltrasphericalKa { gamma, .. } => 1.0 / gamma,
        _ => 1.0 / (spec.basis_params()?.alpha + 0.5),
    };
    let fam = PolynomialFamily::with_max_degree(spec.basis_params()?, Normalization::ValueOneAtOne, n_max)?;
    let (arg, scale) = match *spec {
        UltrasphericalKa { a, .. } => (a, 1.0),
        _ => {
            let a = spec.a();
            (2.0 * a * a - 1.0, a.powi(spec.ell() as i32))
        }
    };
    let lams = fam.eval_upto(n_max, arg)?;
    let terms: Vec<f64> = lams.iter().map(|l| (scale * l).abs().powf(p)).collect();
    // blocks [2^k, 2^(k+1) - 1] that fit below n_max
    let mut partial_sums = vec![(0, terms[0])];
    let mut blocks = vec![];
    let mut acc = terms[0];
    let mut lo = 1;
    while 2 * lo - 1 <= n_max {
        let block: f64 = terms[lo..2 * lo].iter().sum();
        acc += block;
        blocks.push(block);
        partial_sums.push((2 * lo - 1, acc));
        lo *= 2;
    }
    if partial_sums.last().map(|x| x.0) != Some(n_max) {
        acc += terms[lo..].iter().sum::<f64>();
        partial_sums.push((n_max, acc));
    }
    let block_ratios: Vec<f64> = blocks.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).collect();
    let tail: Vec<f64> = block_ratios.iter().rev().take(3).copied().collect();
    let looks_convergent = !tail.is_empty() && tail.iter().sum::<f64>() / (tail.len() as f64) < 0.99;
    Ok(TraceDiagnostic {
        p,
        partial_sums,
        block_ratios,
        looks_convergent,
        above_threshold: p > threshold,
        threshold,
        label: "heuristic dyadic block test on finite partial sums; not conclusive".into(),
    })
}

/// Weighting of w(x) p_n(x)^2 in the uniform bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightConvention {
    /// (1-x)^alpha (1+x)^beta with p_n orthonormal for the probability measure
    Lebesgue,
    /// c_{alpha,beta} (1-x)^alpha (1+x)^beta, the density of that probability measure
    Probability,
}

/// Pinned convention for pass/fail; the other one is reported alongside.
pub const NEM_CONVENTION: WeightConvention = WeightConvention::Probability;

pub fn nem_constant(alpha: f64, beta: f64) -> f64 {
    2.0 * std::f64::consts::E * (2.0 + (alpha * alpha + beta * beta).sqrt()) / std::f64::consts::PI
}

/// max over the grid and n <= n_max of sqrt(1-x^2) w(x) p_n(x)^2 against the constant.
pub fn nem_bound_check(alpha: f64, beta: f64, n_max: usize, x_grid: &[f64]) -> Result<VerificationReport> {
    if !(alpha >= -0.5 && beta >= -0.5) {
        return Err(Error::ParameterDomain(format!("need alpha, beta >= -1/2, got ({alpha}, {beta})")));
    }
    if x_grid.is_empty() || x_grid.iter().any(|x| !(x.abs() <= 1.0)) {
        return Err(Error::InvalidInput("grid must be non-empty and inside [-1, 1]".into()));
    }
    let start = std::time::Instant::now();
    let fam = PolynomialFamily::with_max_degree(JacobiParams::new(alpha, beta)?, Normalization::Orthonormal, n_max)?;
    let c = c_alpha_beta(alpha, beta);
    let per_x: Vec<f64> = x_grid
        .par_iter()
        .map(|&x| {
            let w = (1.0 - x * x).sqrt() * (1.0 - x).powf(alpha) * (1.0 + x).powf(beta);
            if w == 0.0 {
                return 0.0;
            }
            let mut p = vec![0.0; n_max + 1];
            fam.fill(x, &mut p);
            p.iter().fold(0.0f64, |m, v| m.max(w * v * v))
        })
        .collect();
    let lebesgue = per_x.iter().fold(0.0f64, |m, v| m.max(*v));
    let probability = c * lebesgue;
    let rhs = nem_constant(alpha, beta);
    let pinned = match NEM_CONVENTION {
        WeightConvention::Lebesgue => lebesgue,
        WeightConvention::Probability => probability,
    };
    let mut params = std::collections::BTreeMap::new();
    params.insert("alpha".to_string(), alpha);
    params.insert("beta".to_string(), beta);
    params.insert("n_max".to_string(), n_max as f64);
    let mut extra = std::collections::BTreeMap::new();
    extra.insert("max_lhs_lebesgue".into(), lebesgue);
    extra.insert("max_lhs_probability".into(), probability);
    extra.insert("lebesgue_holds".into(), if lebesgue <= rhs { 1.0 } else { 0.0 });
    extra.insert("probability_holds".into(), if probability <= rhs { 1.0 } else { 0.0 });
    let acc = ErrAcc { max_abs: pinned, max_rel: pinned / rhs, count: x_grid.len() * (n_max + 1) };
    Ok(VerificationReport {
        identity_id: "nem_bound".into(),
        params,
        grid: format!("{} pts in [{}:{}]", x_grid.len(), x_grid[0], x_grid[x_grid.len() - 1]),
        max_abs_err: acc.max_abs,
        max_rel_err: acc.max_rel,
        tolerance: rhs,
        pass: acc.max_abs <= rhs,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        extra,
        notes: vec![format!(
            "max_abs_err holds the largest weighted value under the {NEM_CONVENTION:?} convention; tolerance is the bound constant"
        )],
    })
}
