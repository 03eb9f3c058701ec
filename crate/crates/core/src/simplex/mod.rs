//! Orthogonal polynomials on the parabolic biangle and the triangle, with
//! their product formulas and the associated operators.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod biangle;
mod triangle;

pub use biangle::{
    biangle_evaluation_limit, biangle_operator_selfadjoint, biangle_poly, biangle_polynomial_preservation,
    verify_biangle_product, BiangleFamily, BiangleOperator,
};
pub use triangle::{triangle_poly, verify_triangle_product, TriangleFamily, TriangleIntegrator, MAX_QMC_POINTS, TRIANGLE_EVAL_CAP};

/// Slack allowed when checking that an argument lies in [-1, 1].
const EDGE: f64 = 1e-12;

fn unit(x: f64, name: &str) -> Result<()> {
    if !(x.abs() <= 1.0 + EDGE) {
        return Err(Error::Domain(format!("{name} = {x} outside [-1, 1]")));
    }
    Ok(())
}

#[inline]
fn co(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

#[inline]
pub(crate) fn d_raw(a: f64, b: f64, r: f64, t: f64) -> f64 {
    a * b + co(a) * co(b) * r * t
}

#[inline]
pub(crate) fn e_raw(a: f64, b: f64, r: f64, t: f64) -> f64 {
    let ca = co(a);
    let cb = co(b);
    (a * a * b * b + ca * ca * cb * cb * r * r + 2.0 * a * b * ca * cb * r * t).max(0.0).sqrt()
}

/// D(a, b; r, t) = ab + sqrt(1-a^2) sqrt(1-b^2) r t.
pub fn helper_d(a: f64, b: f64, r: f64, t: f64) -> Result<f64> {
    unit(a, "a")?;
    unit(b, "b")?;
    Ok(d_raw(a, b, r, t))
}

/// E(x1, y1; r, t), the length with E^2 = D^2 + (1-x1^2)(1-y1^2) r^2 (1-t^2).
pub fn helper_e(x1: f64, y1: f64, r: f64, t: f64) -> Result<f64> {
    unit(x1, "x1")?;
    unit(y1, "y1")?;
    Ok(e_raw(x1, y1, r, t))
}

/// C = D / E; errors where E vanishes.
pub fn helper_c(x1: f64, y1: f64, r: f64, t: f64) -> Result<f64> {
    let e = helper_e(x1, y1, r, t)?;
    if e == 0.0 {
        return Err(Error::Singular(format!("E = 0 at x1 = {x1}, y1 = {y1}, r = {r}, t = {t}")));
    }
    Ok((d_raw(x1, y1, r, t) / e).clamp(-1.0, 1.0))
}

/// G = D(C, D(s_x, s_y; 1, t2); 1, t3).
pub fn helper_g(c: f64, s_x: f64, s_y: f64, t2: f64, t3: f64) -> Result<f64> {
    unit(c, "C")?;
    let inner = helper_d(s_x, s_y, 1.0, t2)?;
    Ok(d_raw(c, inner.clamp(-1.0, 1.0), 1.0, t3))
}

/// A point of the biangle 0 <= x2^2 <= x1 <= 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BianglePoint {
    pub x1: f64,
    pub x2: f64,
}

impl BianglePoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !(x1 <= 1.0 && x2 * x2 <= x1 + EDGE) {
            return Err(Error::Domain(format!("({x1}, {x2}) outside the biangle 0 <= x2^2 <= x1 <= 1")));
        }
        Ok(Self { x1, x2 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BiangleIndex {
    pub n: usize,
    pub m: usize,
}

impl BiangleIndex {
    pub fn total_degree(&self) -> usize {
        self.n + self.m
    }

    /// All indices with n + m <= d.
    pub fn up_to(d: usize) -> Vec<Self> {
        (0..=d).flat_map(|n| (0..=d - n).map(move |m| BiangleIndex { n, m })).collect()
    }
}

/// A point of the triangle 0 <= x2 <= x1 <= 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrianglePoint {
    pub x1: f64,
    pub x2: f64,
}

impl TrianglePoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !(0.0 <= x2 && x2 <= x1 && x1 <= 1.0) {
            return Err(Error::Domain(format!("({x1}, {x2}) outside the triangle 0 <= x2 <= x1 <= 1")));
        }
        Ok(Self { x1, x2 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriangleIndex {
    pub n: usize,
    pub k: usize,
}

impl TriangleIndex {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidInput(format!("triangle index needs k <= n, got ({n}, {k})")));
        }
        Ok(Self { n, k })
    }

    pub fn up_to(nmax: usize) -> Vec<Self> {
        (0..=nmax).flat_map(|n| (0..=n).map(move |k| TriangleIndex { n, k })).collect()
    }
}

/// Product-formula points are given in square-root coordinates; checks 0 < x1 <= 1 and |x2| <= x1.
pub(crate) fn sqrt_point(p: (f64, f64), nonneg: bool) -> Result<(f64, f64)> {
    let (x1, x2) = p;
    let ok = x1 > 0.0 && x1 <= 1.0 && x2.abs() <= x1 && (!nonneg || x2 >= 0.0);
    if !ok {
        return Err(Error::Domain(format!("product-formula point ({x1}, {x2}) is not admissible")));
    }
    Ok(p)
}
