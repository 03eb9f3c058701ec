use std::time::Instant;

use super::{describe_grid, require_grid, ErrAcc, ReportBuilder, VerificationReport};
use crate::operators::{NodeOperator, UltrasphericalOp};
use crate::orthopoly::{Normalization, PolynomialFamily};
use crate::{Error, Result};

/// P_n(a) P_n(t) against the K_a quadrature of P_n, for all n <= n_max.
pub fn verify_gegenbauer(gamma: f64, n_max: usize, a_grid: &[f64], t_grid: &[f64], tol: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    if !(gamma > 0.0) {
        return Err(Error::ParameterDomain(format!("need gamma > 0, got {gamma}")));
    }
    require_grid("a", a_grid)?;
    require_grid("t", t_grid)?;
    let fam = PolynomialFamily::ultraspherical(gamma, Normalization::ValueOneAtOne)?;
    let nodes = (n_max / 2 + 8).max(32);
    let mut acc = ErrAcc::default();
    let mut lhs_t = vec![0.0; n_max + 1];
    let mut lhs_a = vec![0.0; n_max + 1];
    let mut buf = vec![0.0; n_max + 1];
    for &a in a_grid {
        let op = UltrasphericalOp::new(gamma, a, nodes)?;
        fam.fill(a, &mut lhs_a);
        for &t in t_grid {
            fam.fill(t, &mut lhs_t);
            let mut rhs = vec![0.0; n_max + 1];
            op.visit_nodes(t, &mut |x, w| {
                fam.fill(x, &mut buf);
                for (r, p) in rhs.iter_mut().zip(&buf) {
                    *r += w * p;
                }
            })?;
            for n in 0..=n_max {
                acc.push(lhs_a[n] * lhs_t[n], rhs[n]);
            }
        }
    }
    let regime = if gamma > 0.5 { 1.0 } else { 0.0 };
    Ok(ReportBuilder::new(start, "gegenbauer", &[("gamma", gamma), ("n_max", n_max as f64)], grid2(a_grid, t_grid))
        .extra("classical_regime", regime)
        .extra("nodes", nodes as f64)
        .finish(acc, tol))
}

pub(crate) fn grid2(a: &[f64], t: &[f64]) -> String {
    format!("a: {} x t: {}", describe_grid(a), describe_grid(t))
}
