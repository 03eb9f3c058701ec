use std::time::Instant;

use num_complex::Complex64;

use super::gegenbauer::grid2;
use super::{describe_grid, require_grid, ErrAcc, ReportBuilder, VerificationReport};
use crate::operators::{GasperOp, NodeOperator};
use crate::orthopoly::{zonal_upto, Normalization, PolynomialFamily};
use crate::quadrature::disk_rule;
use crate::special::binomial;
use crate::{Error, Result};

fn strict(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > beta && beta > -0.5) {
        return Err(Error::Regime(format!("need alpha > beta > -1/2, got ({alpha}, {beta})")));
    }
    Ok(())
}

fn open_at_minus_one(t_grid: &[f64]) -> Result<()> {
    if let Some(t) = t_grid.iter().find(|t| !(**t > -1.0 && **t <= 1.0)) {
        return Err(Error::Domain(format!("t = {t} outside (-1, 1]")));
    }
    Ok(())
}

/// a^l p_n(t)/p_n(1) p_n(2a^2 - 1) against the disk integral defining K_{a,l}.
pub fn verify_gasper_product(
    alpha: f64,
    beta: f64,
    ell: usize,
    n_max: usize,
    a_grid: &[f64],
    t_grid: &[f64],
    tol: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    strict(alpha, beta)?;
    require_grid("a", a_grid)?;
    require_grid("t", t_grid)?;
    open_at_minus_one(t_grid)?;
    let fam = PolynomialFamily::jacobi(alpha, beta + ell as f64, Normalization::Orthonormal)?;
    let ratio = fam.renormalized(Normalization::ValueOneAtOne);
    let nodes = (n_max + ell + 8).max(24);
    let mut acc = ErrAcc::default();
    let (mut pt, mut pa, mut buf) = (vec![0.0; n_max + 1], vec![0.0; n_max + 1], vec![0.0; n_max + 1]);
    for &a in a_grid {
        let op = GasperOp::new(alpha, beta, ell, a, nodes, nodes)?;
        fam.fill(2.0 * a * a - 1.0, &mut pa);
        let al = a.powi(ell as i32);
        for &t in t_grid {
            ratio.fill(t, &mut pt);
            let mut rhs = vec![0.0; n_max + 1];
            op.visit_nodes(t, &mut |x, w| {
                fam.fill(x, &mut buf);
                for (r, p) in rhs.iter_mut().zip(&buf) {
                    *r += w * p;
                }
            })?;
            for n in 0..=n_max {
                acc.push(al * pt[n] * pa[n], rhs[n]);
            }
        }
    }
    let params = [("alpha", alpha), ("beta", beta), ("ell", ell as f64), ("n_max", n_max as f64)];
    Ok(ReportBuilder::new(start, "gasper_product", &params, grid2(a_grid, t_grid))
        .extra("nodes", nodes as f64)
        .finish(acc, tol))
}

/// p_n(t)/p_n(1) for the (alpha, beta + l) family against the complex Laplace-type
/// integral over the disk measure. Passing also needs |Im| <= imag_tol.
pub fn verify_koornwinder(
    alpha: f64,
    beta: f64,
    ell: usize,
    n_max: usize,
    t_grid: &[f64],
    tol: f64,
    imag_tol: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    strict(alpha, beta)?;
    require_grid("t", t_grid)?;
    open_at_minus_one(t_grid)?;
    let ratio = PolynomialFamily::jacobi(alpha, beta + ell as f64, Normalization::ValueOneAtOne)?;
    let nodes = (n_max + ell + 8).max(24);
    let disk = disk_rule(alpha, beta, nodes, nodes)?;
    // per node: sum_k C(l,k) (ir)^k P_k(cos theta), without the t-dependent factor
    let zonal: Vec<Vec<f64>> = (0..disk.len()).map(|k| zonal_upto(beta, ell, disk.node(k)[1])).collect::<Result<_>>()?;
    let ipow = |k: usize| [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()][k % 4];

    let mut acc = ErrAcc::default();
    let mut max_imag: f64 = 0.0;
    let mut lhs = vec![0.0; n_max + 1];
    for &t in t_grid {
        ratio.fill(t, &mut lhs);
        let q = ((1.0 - t) / (1.0 + t)).sqrt();
        let sq = (1.0 - t * t).max(0.0).sqrt();
        let mut rhs = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for k in 0..disk.len() {
            let node = disk.node(k);
            let (r, c) = (node[0], node[1]);
            let z = Complex64::new(((1.0 + t) - (1.0 - t) * r * r) / 2.0, sq * r * c);
            let mut bracket = Complex64::new(0.0, 0.0);
            let mut pw = 1.0;
            for j in 0..=ell {
                bracket += ipow(j) * (binomial(ell, j) * pw * zonal[k][j]);
                pw *= q * r;
            }
            let mut term = bracket * disk.weights[k];
            for slot in rhs.iter_mut() {
                *slot += term;
                term *= z;
            }
        }
        for n in 0..=n_max {
            acc.push(lhs[n], rhs[n].re);
            max_imag = max_imag.max(rhs[n].im.abs());
        }
    }
    let params = [("alpha", alpha), ("beta", beta), ("ell", ell as f64), ("n_max", n_max as f64)];
    Ok(ReportBuilder::new(start, "koornwinder", &params, format!("t: {}", describe_grid(t_grid)))
        .extra("max_imag", max_imag)
        .extra("imag_tol", imag_tol)
        .finish_with(acc, tol, max_imag <= imag_tol))
}
