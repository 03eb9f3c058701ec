use std::time::Instant;

use std::f64::consts::FRAC_PI_4;

use super::{ErrAcc, ReportBuilder, VerificationReport};
use crate::operators::{GasperOp, NodeOperator};
use crate::orthopoly::zonal_upto;
use crate::quadrature::{ultraspherical_rule, unit_interval_rule};
use crate::special::{beta_fn, c_alpha_beta, disk_constant};
use crate::{Error, Result};

fn check(alpha: f64, beta: f64, a: f64) -> Result<()> {
    if !(alpha > beta && beta > -0.5) {
        return Err(Error::Regime(format!("need alpha > beta > -1/2, got ({alpha}, {beta})")));
    }
    if !(a.abs() < 1.0) {
        return Err(Error::ParameterDomain(format!("need |a| < 1, got {a}")));
    }
    Ok(())
}

/// q(h1, h2) = 2 c int_0^1 h1(2s^2-1) (K_{a,l} h2)(2s^2-1) (1-s^2)^alpha s^(2 beta + 2l + 1) ds.
pub fn q_form_direct(
    alpha: f64,
    beta: f64,
    ell: usize,
    a: f64,
    h1: &dyn Fn(f64) -> f64,
    h2: &dyn Fn(f64) -> f64,
    nodes: usize,
) -> Result<f64> {
    check(alpha, beta, a)?;
    let lb = ell as f64;
    let op = GasperOp::new(alpha, beta, ell, a, nodes, nodes)?;
    let rule = unit_interval_rule(alpha, beta + lb, nodes)?;
    let mut acc = 0.0;
    for (u, w) in rule.pairs() {
        let t = 2.0 * u - 1.0;
        acc += w * h1(t) * op.apply(h2, t)?;
    }
    Ok(c_alpha_beta(alpha, beta) * beta_fn(alpha + 1.0, beta + lb + 1.0) * acc)
}

/// The same form written as the kernel integral over (s, rho, phi) that is
/// symmetric in (h1, h2); integrated in polar coordinates s = R cos psi, rho = R sin psi.
pub fn q_form_symmetric(
    alpha: f64,
    beta: f64,
    ell: usize,
    a: f64,
    h1: &dyn Fn(f64) -> f64,
    h2: &dyn Fn(f64) -> f64,
    nodes: usize,
) -> Result<f64> {
    check(alpha, beta, a)?;
    let b2 = 1.0 - a * a;
    let kappa = alpha - beta - 1.0;
    let p = 2.0 * beta + ell as f64 + 1.0;

    // R^2 = R_max^2 u, weight (1-u)^kappa u^p
    let u_rule = unit_interval_rule(kappa, p, nodes)?;
    let u_mass = beta_fn(kappa + 1.0, p + 1.0);
    // psi = pi/4 (1 + y), weight (1-y^2)^p
    let y_rule = ultraspherical_rule(p + 0.5, nodes)?;
    let y_mass = beta_fn(0.5, p + 1.0);
    // t = cos phi, weight (1-t^2)^(beta - 1/2)
    let t_rule = ultraspherical_rule(beta, nodes)?;
    let t_mass = beta_fn(0.5, beta + 0.5);

    let mut total = 0.0;
    for (t, wt) in t_rule.pairs() {
        let zonal = *zonal_upto(beta, ell, t)?.last().unwrap();
        let mut over_psi = 0.0;
        for (y, wy) in y_rule.pairs() {
            let psi = FRAC_PI_4 * (1.0 + y);
            let (sn, cs) = psi.sin_cos();
            let sin2 = 2.0 * sn * cs;
            let rmax2 = b2 / (1.0 - a * sin2 * t);
            // (sin psi cos psi)^p / (1 - y^2)^p, smooth on [-1, 1]
            let ratio = if y.abs() < 1.0 { (0.5 * sin2 / (1.0 - y * y)).powf(p) } else { (FRAC_PI_4 / 2.0).powf(p) };
            let mut inner = 0.0;
            for (u, wu) in u_rule.pairs() {
                let r2 = rmax2 * u;
                inner += wu * h1(2.0 * r2 * cs * cs - 1.0) * h2(2.0 * r2 * sn * sn - 1.0);
            }
            inner *= u_mass * 0.5 * rmax2 * b2.powf(kappa) * rmax2.powf(p);
            over_psi += wy * ratio * inner;
        }
        over_psi *= y_mass * FRAC_PI_4;
        total += wt * zonal * over_psi;
    }
    total *= t_mass;
    let constant = 2.0 * c_alpha_beta(alpha, beta) * disk_constant(alpha, beta) * b2.powf(-alpha);
    Ok(constant * total)
}

/// q(h1, h2) and q(h2, h1) by the direct form, and both against the symmetric kernel form.
#[allow(clippy::too_many_arguments)]
pub fn verify_selfadjoint_symmetrized_form(
    alpha: f64,
    beta: f64,
    ell: usize,
    a: f64,
    h1: &dyn Fn(f64) -> f64,
    h2: &dyn Fn(f64) -> f64,
    nodes: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let q12 = q_form_direct(alpha, beta, ell, a, h1, h2, nodes)?;
    let q21 = q_form_direct(alpha, beta, ell, a, h2, h1, nodes)?;
    let s12 = q_form_symmetric(alpha, beta, ell, a, h1, h2, nodes)?;
    let s21 = q_form_symmetric(alpha, beta, ell, a, h2, h1, nodes)?;
    let mut acc = ErrAcc::default();
    acc.push(q12, q21);
    acc.push(q12, s12);
    acc.push(q21, s21);
    let params = [("alpha", alpha), ("beta", beta), ("ell", ell as f64), ("a", a)];
    Ok(ReportBuilder::new(start, "selfadjoint", &params, format!("{nodes} nodes per axis"))
        .extra("q12", q12)
        .extra("q21", q21)
        .extra("symmetric_q12", s12)
        .extra("symmetric_q21", s21)
        .finish(acc, tol))
}
