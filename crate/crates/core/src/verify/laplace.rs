use std::time::Instant;

use num_complex::Complex64;

use super::{describe_grid, require_grid, ErrAcc, ReportBuilder, VerificationReport};
use crate::orthopoly::zonal_upto;
use crate::quadrature::ultraspherical_rule;
use crate::special::{beta_fn, gamma};
use crate::{Error, Result};

/// P_l^{(beta)}(x) against its Laplace integral over phi in [0, pi].
///
/// Points with |x| < 1 use complex arithmetic; the real part is compared and the
/// largest imaginary part is stored under `max_imag`.
pub fn verify_laplace(beta: f64, ell_max: usize, x_grid: &[f64], tol: f64) -> Result<VerificationReport> {
    let start = Instant::now();
    if !(beta > 0.0) {
        return Err(Error::ParameterDomain(format!("Laplace integral needs beta > 0, got {beta}")));
    }
    require_grid("x", x_grid)?;
    // s = cos(phi); weight (1 - s^2)^(beta - 1) as a probability rule
    let rule = ultraspherical_rule(beta - 0.5, (ell_max / 2 + 8).max(32))?;
    let lebesgue_mass = beta_fn(0.5, beta);
    let constant = gamma(beta + 0.5) / (std::f64::consts::PI.sqrt() * gamma(beta));
    let scale = constant * lebesgue_mass;

    let mut acc = ErrAcc::default();
    let mut max_imag: f64 = 0.0;
    for &x in x_grid {
        let lhs = zonal_upto(beta, ell_max, x)?;
        let root = Complex64::new(x * x - 1.0, 0.0).sqrt();
        let mut rhs = vec![Complex64::new(0.0, 0.0); ell_max + 1];
        for (s, w) in rule.pairs() {
            let z = x + root * s;
            let mut pw = Complex64::new(w, 0.0);
            for slot in rhs.iter_mut() {
                *slot += pw;
                pw *= z;
            }
        }
        for (l, r) in lhs.iter().zip(&rhs) {
            acc.push(*l, scale * r.re);
            max_imag = max_imag.max((scale * r.im).abs());
        }
    }
    Ok(ReportBuilder::new(start, "laplace", &[("beta", beta), ("ell_max", ell_max as f64)], format!("x: {}", describe_grid(x_grid)))
        .extra("max_imag", max_imag)
        .extra("normalizing_constant", scale)
        .finish(acc, tol))
}
