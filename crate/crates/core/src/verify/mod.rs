//! Numerical checks of the product formulas and integral identities.
//!
//! Each check evaluates the two sides along separate routes: closed-form
//! polynomial values on one side and quadrature (or sampling) on the other.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod gasper;
mod gegenbauer;
pub mod geometric;
mod laplace;
mod selfadjoint;

pub use gasper::{verify_gasper_product, verify_koornwinder};
pub use gegenbauer::verify_gegenbauer;
pub use geometric::{
    ball_basis, verify_geometric_ball, verify_geometric_form, verify_geometric_scalar, BallBasisFn, GeometricCase, Harmonic,
};
pub use laplace::verify_laplace;
pub use selfadjoint::{q_form_direct, q_form_symmetric, verify_selfadjoint_symmetrized_form};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity_id: String,
    pub params: BTreeMap<String, f64>,
    pub grid: String,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: f64,
    /// Secondary diagnostics (imaginary parts, raw Monte Carlo differences, ...).
    pub extra: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn csv_header() -> &'static str {
        "identity_id,params,grid,max_abs_err,max_rel_err,tolerance,pass"
    }

    /// One CSV row; runtimes are left out so that reruns are byte-identical.
    pub fn csv_row(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.identity_id,
            params.join(";"),
            self.grid.replace(',', ";"),
            crate::report::fmt_f64(self.max_abs_err),
            crate::report::fmt_f64(self.max_rel_err),
            crate::report::fmt_f64(self.tolerance),
            self.pass
        )
    }
}

/// Tracks the worst absolute and relative discrepancy.
#[derive(Clone, Copy, Debug, Default)]
pub struct ErrAcc {
    pub max_abs: f64,
    pub max_rel: f64,
    pub count: usize,
}

impl ErrAcc {
    pub fn push(&mut self, lhs: f64, rhs: f64) {
        let d = (lhs - rhs).abs();
        self.count += 1;
        if !d.is_finite() {
            self.max_abs = f64::INFINITY;
            self.max_rel = f64::INFINITY;
            return;
        }
        self.max_abs = self.max_abs.max(d);
        let scale = lhs.abs().max(rhs.abs());
        if scale > 1e-12 {
            self.max_rel = self.max_rel.max(d / scale);
        }
    }

    pub fn merge(&mut self, o: &ErrAcc) {
        self.max_abs = self.max_abs.max(o.max_abs);
        self.max_rel = self.max_rel.max(o.max_rel);
        self.count += o.count;
    }
}

pub(crate) struct ReportBuilder {
    id: String,
    params: BTreeMap<String, f64>,
    grid: String,
    start: Instant,
    extra: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn new(start: Instant, id: &str, params: &[(&str, f64)], grid: String) -> Self {
        Self {
            id: id.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            grid,
            start,
            extra: BTreeMap::new(),
            notes: vec![],
        }
    }

    pub fn extra(mut self, key: &str, v: f64) -> Self {
        self.extra.insert(key.to_string(), v);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn finish(self, acc: ErrAcc, tolerance: f64) -> VerificationReport {
        self.finish_with(acc, tolerance, true)
    }

    pub fn finish_with(self, acc: ErrAcc, tolerance: f64, also: bool) -> VerificationReport {
        VerificationReport {
            identity_id: self.id,
            params: self.params,
            grid: self.grid,
            max_abs_err: acc.max_abs,
            max_rel_err: acc.max_rel,
            tolerance,
            pass: acc.max_abs <= tolerance && also,
            runtime_ms: self.start.elapsed().as_secs_f64() * 1e3,
            extra: self.extra,
            notes: self.notes,
        }
    }
}

/// n equally spaced points on [lo, hi]; n = 1 gives the midpoint.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::InvalidInput("empty grid".into())),
        1 => Ok(vec![0.5 * (lo + hi)]),
        _ => Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()),
    }
}

pub(crate) fn require_grid(name: &str, g: &[f64]) -> Result<()> {
    if g.is_empty() {
        return Err(Error::InvalidInput(format!("empty {name} grid")));
    }
    Ok(())
}

pub(crate) fn describe_grid(g: &[f64]) -> String {
    match g.len() {
        0 => "empty".into(),
        1 => format!("{{{}}}", g[0]),
        n => format!("{n} pts in [{}:{}]", g[0], g[n - 1]),
    }
}
