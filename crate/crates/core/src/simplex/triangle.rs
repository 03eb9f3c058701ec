use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{d_raw, e_raw, sqrt_point, TriangleIndex, TrianglePoint};
use crate::orthopoly::{JacobiParams, Normalization, PolynomialFamily};
use crate::quadrature::qmc::{sobol_point, BetaQuantile};
use crate::quadrature::{disk_rule, unit_interval_rule};
use crate::verify::{ErrAcc, VerificationReport};
use crate::{Error, Result};

/// Largest number of integrand evaluations the nested tensor loops may use.
pub const TRIANGLE_EVAL_CAP: usize = 100_000_000;
const SE_FLOOR: f64 = 1e-13;
/// Length of one scrambled Sobol sequence.
pub const MAX_QMC_POINTS: usize = 1 << 16;

/// R_{n,k}(x1, x2) = R_{n-k}^{(alpha, beta+gamma+2k+1)}(2 x1 - 1) x1^k R_k^{(beta,gamma)}(2 x2/x1 - 1),
/// every factor normalized to one at one.
#[derive(Clone, Debug)]
pub struct TriangleFamily {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    inner: PolynomialFamily<f64>,
    outer: Vec<PolynomialFamily<f64>>,
}

impl TriangleFamily {
    pub fn new(alpha: f64, beta: f64, gamma: f64, max_degree: usize) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0 && gamma > -1.0) {
            return Err(Error::ParameterDomain(format!(
                "triangle weight needs alpha, beta, gamma > -1, got ({alpha}, {beta}, {gamma})"
            )));
        }
        let norm = Normalization::ValueOneAtOne;
        let inner = PolynomialFamily::with_max_degree(JacobiParams::new(beta, gamma)?, norm, max_degree)?;
        let outer = (0..=max_degree)
            .map(|k| {
                let b = beta + gamma + 2.0 * k as f64 + 1.0;
                PolynomialFamily::with_max_degree(JacobiParams::new(alpha, b)?, norm, max_degree)
            })
            .collect::<Result<_>>()?;
        Ok(Self { alpha, beta, gamma, inner, outer })
    }

    pub fn max_degree(&self) -> usize {
        self.outer.len() - 1
    }

    /// All R_{n,k} with n <= max_degree at (x1, x2) = (e2, e2 h2), as table[n][k].
    fn eval_scaled(&self, e2: f64, h2: f64) -> Vec<Vec<f64>> {
        let d = self.max_degree();
        let mut inner = vec![0.0; d + 1];
        self.inner.fill((2.0 * h2 - 1.0).clamp(-1.0, 1.0), &mut inner);
        let x = 2.0 * e2 - 1.0;
        let mut out: Vec<Vec<f64>> = (0..=d).map(|n| vec![0.0; n + 1]).collect();
        let mut pw = 1.0;
        let mut rad = vec![0.0; d + 1];
        for k in 0..=d {
            self.outer[k].fill(x, &mut rad[..d - k + 1]);
            for n in k..=d {
                out[n][k] = rad[n - k] * pw * inner[k];
            }
            pw *= e2;
        }
        out
    }

    pub fn eval(&self, idx: TriangleIndex, p: TrianglePoint) -> Result<f64> {
        TriangleIndex::new(idx.n, idx.k)?;
        TrianglePoint::new(p.x1, p.x2)?;
        if idx.n > self.max_degree() {
            return Err(Error::DegreeOutOfRange { requested: idx.n, max: self.max_degree() });
        }
        if p.x1 == 0.0 {
            // x1^k R_k(2 x2/x1 - 1) is homogeneous of degree k
            return Ok(if idx.k == 0 { self.outer[0].eval(idx.n, -1.0)? } else { 0.0 });
        }
        Ok(self.eval_scaled(p.x1, p.x2 / p.x1)[idx.n][idx.k])
    }
}

pub fn triangle_poly(alpha: f64, beta: f64, gamma: f64, idx: TriangleIndex, x1: f64, x2: f64) -> Result<f64> {
    TriangleFamily::new(alpha, beta, gamma, idx.n)?.eval(idx, TrianglePoint::new(x1, x2)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TriangleIntegrator {
    /// Gauss rules with this many nodes on each of the seven axes.
    Tensor { nodes: usize },
    /// `replicates` independently scrambled Sobol sets of `points` each.
    Qmc { points: usize, replicates: usize, seed: u64 },
}

fn regime(alpha: f64, beta: f64, gamma: f64) -> Result<()> {
    if !(alpha > beta + gamma + 1.0 && beta > gamma && gamma > -0.5) {
        return Err(Error::Regime(format!(
            "triangle product formula needs alpha > beta + gamma + 1 and beta > gamma > -1/2, got ({alpha}, {beta}, {gamma})"
        )));
    }
    Ok(())
}

struct Geometry {
    x1: f64,
    y1: f64,
    sx: f64,
    sy: f64,
}

impl Geometry {
    /// (E^2, H^2) at one point of the seven-dimensional parameter space.
    #[inline]
    fn eh(&self, r1: f64, t1: f64, r2: f64, r3: f64, t2: f64, r4: f64, t3: f64) -> (f64, f64) {
        let e = e_raw(self.x1, self.y1, r1, t1);
        let c = if e > 0.0 { (d_raw(self.x1, self.y1, r1, t1) / e).clamp(-1.0, 1.0) } else { 1.0 };
        let a = ((1.0 - r2) * c * c + r2).sqrt().min(1.0);
        let b = e_raw(self.sx, self.sy, r3, t2).min(1.0);
        let h = e_raw(a, b, r4, t3);
        (e * e, h * h)
    }
}

fn tensor(fam: &TriangleFamily, g: &Geometry, nodes: usize) -> Result<Vec<Vec<f64>>> {
    let (alpha, beta, gamma) = (fam.alpha, fam.beta, fam.gamma);
    let d1 = disk_rule(alpha, beta + gamma + 1.0, nodes, nodes)?;
    let nu = unit_interval_rule(beta, gamma - 0.5, nodes)?;
    let dm = disk_rule(beta, gamma, nodes, nodes)?;
    let deg = fam.max_degree();
    // the (r3, t2) factor depends on x, y only
    let b_vals: Vec<(f64, f64)> = (0..dm.len())
        .map(|k| (e_raw(g.sx, g.sy, dm.node(k)[0], dm.node(k)[1]).min(1.0), dm.weights[k]))
        .collect();
    let parts: Vec<Vec<Vec<f64>>> = (0..d1.len())
        .into_par_iter()
        .map(|k1| {
            let (r1, t1) = (d1.node(k1)[0], d1.node(k1)[1]);
            let e = e_raw(g.x1, g.y1, r1, t1);
            let c = if e > 0.0 { (d_raw(g.x1, g.y1, r1, t1) / e).clamp(-1.0, 1.0) } else { 1.0 };
            // integral over (r2, r3, t2, r4, t3) of R_k^{(beta,gamma)}(2 H^2 - 1)
            let mut inner_k = vec![0.0; deg + 1];
            let mut buf = vec![0.0; deg + 1];
            for (r2, w2) in nu.pairs() {
                let a = ((1.0 - r2) * c * c + r2).sqrt().min(1.0);
                for &(b, wb) in &b_vals {
                    let wab = w2 * wb;
                    for k4 in 0..dm.len() {
                        let (r4, t3) = (dm.node(k4)[0], dm.node(k4)[1]);
                        let h = e_raw(a, b, r4, t3);
                        fam.inner.fill((2.0 * h * h - 1.0).clamp(-1.0, 1.0), &mut buf);
                        let w = wab * dm.weights[k4];
                        inner_k.iter_mut().zip(&buf).for_each(|(s, v)| *s += w * v);
                    }
                }
            }
            let e2 = e * e;
            let mut out: Vec<Vec<f64>> = (0..=deg).map(|n| vec![0.0; n + 1]).collect();
            let mut rad = vec![0.0; deg + 1];
            let mut pw = 1.0;
            for k in 0..=deg {
                fam.outer[k].fill(2.0 * e2 - 1.0, &mut rad[..deg - k + 1]);
                for n in k..=deg {
                    out[n][k] = d1.weights[k1] * rad[n - k] * pw * inner_k[k];
                }
                pw *= e2;
            }
            out
        })
        .collect();
    let mut total: Vec<Vec<f64>> = (0..=deg).map(|n| vec![0.0; n + 1]).collect();
    for p in &parts {
        for (row, pr) in total.iter_mut().zip(p) {
            row.iter_mut().zip(pr).for_each(|(t, v)| *t += v);
        }
    }
    Ok(total)
}

struct QmcMaps {
    r1: BetaQuantile,
    t1: BetaQuantile,
    r2: BetaQuantile,
    r3: BetaQuantile,
    t2: BetaQuantile,
}

fn replicate_seed(seed: u64, rep: usize) -> u32 {
    let x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(rep as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (x ^ (x >> 31)) as u32
}

/// Replicate means of every R_{n,k}, as [rep][n][k].
fn qmc(fam: &TriangleFamily, g: &Geometry, points: usize, replicates: usize, seed: u64) -> Result<Vec<Vec<Vec<f64>>>> {
    if points == 0 || replicates < 2 {
        return Err(Error::InvalidInput("qmc needs at least one point and two replicates".into()));
    }
    if points > MAX_QMC_POINTS {
        return Err(Error::InvalidInput(format!(
            "qmc supports at most {MAX_QMC_POINTS} points per replicate; use more replicates instead"
        )));
    }
    let (alpha, beta, gamma) = (fam.alpha, fam.beta, fam.gamma);
    let b1 = beta + gamma + 1.0;
    let maps = QmcMaps {
        r1: BetaQuantile::new(b1 + 1.0, alpha - b1)?,
        t1: BetaQuantile::new(b1 + 0.5, b1 + 0.5)?,
        r2: BetaQuantile::new(gamma + 0.5, beta + 1.0)?,
        r3: BetaQuantile::new(gamma + 1.0, beta - gamma)?,
        t2: BetaQuantile::new(gamma + 0.5, gamma + 0.5)?,
    };
    let deg = fam.max_degree();
    const BLOCK: usize = 1 << 14;
    let mut reps = vec![];
    for rep in 0..replicates {
        let s = replicate_seed(seed, rep);
        let blocks: Vec<usize> = (0..points.div_ceil(BLOCK)).collect();
        let parts: Vec<Vec<Vec<f64>>> = blocks
            .par_iter()
            .map(|&bk| {
                let mut u = [0.0; 7];
                let mut acc: Vec<Vec<f64>> = (0..=deg).map(|n| vec![0.0; n + 1]).collect();
                for i in bk * BLOCK..((bk + 1) * BLOCK).min(points) {
                    sobol_point(i as u32, s, &mut u);
                    let r1 = maps.r1.quantile(u[0]).sqrt();
                    let t1 = 2.0 * maps.t1.quantile(u[1]) - 1.0;
                    let r2 = maps.r2.quantile(u[2]);
                    let r3 = maps.r3.quantile(u[3]).sqrt();
                    let t2 = 2.0 * maps.t2.quantile(u[4]) - 1.0;
                    let r4 = maps.r3.quantile(u[5]).sqrt();
                    let t3 = 2.0 * maps.t2.quantile(u[6]) - 1.0;
                    let (e2, h2) = g.eh(r1, t1, r2, r3, t2, r4, t3);
                    let v = fam.eval_scaled(e2, h2);
                    for (row, vr) in acc.iter_mut().zip(&v) {
                        row.iter_mut().zip(vr).for_each(|(a, x)| *a += x);
                    }
                }
                acc
            })
            .collect();
        let mut total: Vec<Vec<f64>> = (0..=deg).map(|n| vec![0.0; n + 1]).collect();
        for p in &parts {
            for (row, pr) in total.iter_mut().zip(p) {
                row.iter_mut().zip(pr).for_each(|(t, v)| *t += v / points as f64);
            }
        }
        reps.push(total);
    }
    Ok(reps)
}

/// R(x1^2, x2^2) R(y1^2, y2^2) against the integral of R(E^2, E^2 H^2) for all n <= max_degree.
/// Points are in square-root coordinates with 0 <= x2 <= x1.
pub fn verify_triangle_product(
    alpha: f64,
    beta: f64,
    gamma: f64,
    max_degree: usize,
    pt_x: (f64, f64),
    pt_y: (f64, f64),
    integrator: TriangleIntegrator,
    tol: f64,
) -> Result<VerificationReport> {
    regime(alpha, beta, gamma)?;
    let start = std::time::Instant::now();
    let (x1, x2) = sqrt_point(pt_x, true)?;
    let (y1, y2) = sqrt_point(pt_y, true)?;
    let fam = TriangleFamily::new(alpha, beta, gamma, max_degree)?;
    let lx = fam.eval_scaled(x1 * x1, (x2 / x1).powi(2));
    let ly = fam.eval_scaled(y1 * y1, (y2 / y1).powi(2));
    let g = Geometry { x1, y1, sx: x2 / x1, sy: y2 / y1 };
    let mut notes = vec![];
    let mut integrator = integrator;
    if let TriangleIntegrator::Tensor { nodes } = integrator {
        if nodes.checked_pow(7).is_none_or(|c| c > TRIANGLE_EVAL_CAP) {
            notes.push(format!(
                "{nodes}^7 evaluations exceed the cap of {TRIANGLE_EVAL_CAP}; switched to qmc with seed 0"
            ));
            integrator = TriangleIntegrator::Qmc { points: MAX_QMC_POINTS, replicates: 16, seed: 0 };
        }
    }
    let mut params = std::collections::BTreeMap::new();
    params.insert("alpha".to_string(), alpha);
    params.insert("beta".to_string(), beta);
    params.insert("gamma".to_string(), gamma);
    params.insert("max_degree".to_string(), max_degree as f64);
    let mut extra = std::collections::BTreeMap::new();
    let point = format!("x=({x1};{x2}) y=({y1};{y2})");
    let (acc, tolerance, grid) = match integrator {
        TriangleIntegrator::Tensor { nodes } => {
            let rhs = tensor(&fam, &g, nodes)?;
            let mut acc = ErrAcc::default();
            for n in 0..=max_degree {
                for k in 0..=n {
                    acc.push(lx[n][k] * ly[n][k], rhs[n][k]);
                }
            }
            (acc, tol, format!("{point}, tensor {nodes}^7"))
        }
        TriangleIntegrator::Qmc { points, replicates, seed } => {
            let reps = qmc(&fam, &g, points, replicates, seed)?;
            let rn = replicates as f64;
            let (mut max_z, mut max_diff): (f64, f64) = (0.0, 0.0);
            for n in 0..=max_degree {
                for k in 0..=n {
                    let vals: Vec<f64> = reps.iter().map(|r| r[n][k]).collect();
                    let mean = vals.iter().sum::<f64>() / rn;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (rn - 1.0);
                    let se = (var / rn).sqrt();
                    let diff = (mean - lx[n][k] * ly[n][k]).abs();
                    max_diff = max_diff.max(diff);
                    max_z = max_z.max(diff / se.max(SE_FLOOR));
                }
            }
            extra.insert("max_abs_diff".to_string(), max_diff);
            notes.push("errors are in units of the QMC standard error across scrambled replicates".into());
            let acc = ErrAcc { max_abs: max_z, max_rel: max_diff, count: 0 };
            (acc, 5.0, format!("{point}, qmc {replicates} x {points} seed {seed}"))
        }
    };
    Ok(VerificationReport {
        identity_id: "triangle_product".into(),
        params,
        grid,
        max_abs_err: acc.max_abs,
        max_rel_err: acc.max_rel,
        tolerance,
        pass: acc.max_abs <= tolerance,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        extra,
        notes,
    })
}
