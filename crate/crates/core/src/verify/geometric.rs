use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ReportBuilder, VerificationReport};
use crate::operators::{geometric_params, GasperOp, NodeOperator, UltrasphericalOp};
use crate::orthopoly::{zonal_upto, Normalization, PolynomialFamily};
use crate::quadrature::sampling::{chunks, Moments};
use crate::quadrature::{gauss_jacobi_rule, ultraspherical_rule, SphereSampler};
use crate::{Error, Result};

const QUAD_NODES: usize = 48;
/// Standard errors below this are treated as zero variance.
const SE_FLOOR: f64 = 2.5e-11;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GeometricCase {
    /// x uniform on S^{N-1}, f(x_N) g(a x_N + b x_{N-1}).
    Scalar { n: usize },
    /// x uniform on m x (N-1) matrices of unit norm, f(x u1) g(x u2).
    Ball { m: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Harmonic {
    /// |v|^l P_l(v_1 / |v|)
    Zonal,
    /// v_2, degree one only
    SecondAxis,
}

/// f(v) = p_n^{(alpha, beta + l)}(2|v|^2 - 1) H(v) with H harmonic of degree l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallBasisFn {
    pub n: usize,
    pub ell: usize,
    pub harmonic: Harmonic,
}

/// Basis functions of total degree 2n + l <= max_degree.
pub fn ball_basis(max_degree: usize) -> Vec<BallBasisFn> {
    let mut out = vec![];
    for ell in 0..=max_degree {
        for n in 0..=(max_degree - ell) / 2 {
            out.push(BallBasisFn { n, ell, harmonic: Harmonic::Zonal });
            if ell == 1 {
                out.push(BallBasisFn { n, ell, harmonic: Harmonic::SecondAxis });
            }
        }
    }
    out
}

fn mc_pairs<E>(d: usize, samples: usize, seed: u64, nf: usize, ng: usize, eval: E) -> Result<Vec<Moments>>
where
    E: Fn(&[f64], &mut [f64], &mut [f64]) + Sync,
{
    if samples < 2 {
        return Err(Error::InvalidInput("Monte Carlo needs at least two samples".into()));
    }
    let sampler = SphereSampler::new(d, seed)?;
    let parts: Vec<Vec<Moments>> = chunks(samples)
        .into_par_iter()
        .map(|(k, count)| {
            let mut rng = sampler.stream(k);
            let mut x = vec![0.0; d];
            let (mut fv, mut gv) = (vec![0.0; nf], vec![0.0; ng]);
            let mut mom = vec![Moments::default(); nf * ng];
            for _ in 0..count {
                sampler.fill(&mut rng, &mut x);
                eval(&x, &mut fv, &mut gv);
                for i in 0..nf {
                    for j in 0..ng {
                        mom[i * ng + j].push(fv[i] * gv[j]);
                    }
                }
            }
            mom
        })
        .collect();
    let mut total = vec![Moments::default(); nf * ng];
    for p in &parts {
        total.iter_mut().zip(p).for_each(|(t, q)| t.merge(q));
    }
    Ok(total)
}

fn finish(
    start: Instant,
    id: &str,
    params: &[(&str, f64)],
    samples: usize,
    seed: u64,
    quad: &[f64],
    mc: &[Moments],
) -> VerificationReport {
    let mut max_z: f64 = 0.0;
    let mut max_diff: f64 = 0.0;
    let mut degenerate = 0;
    for (q, m) in quad.iter().zip(mc) {
        let diff = (m.mean() - q).abs();
        let se = m.std_error();
        if se < SE_FLOOR {
            degenerate += 1;
        }
        max_z = max_z.max(diff / se.max(SE_FLOOR));
        max_diff = max_diff.max(diff);
    }
    let mut b = ReportBuilder::new(start, id, params, format!("{samples} samples, seed {seed}, {} pairs", quad.len()))
        .extra("max_abs_diff", max_diff)
        .extra("pairs", quad.len() as f64)
        .note("errors are in units of the Monte Carlo standard error");
    if degenerate > 0 {
        b = b.note(format!("{degenerate} pairs have zero variance; their criterion is |diff| <= 4 * {SE_FLOOR:e}"));
    }
    let acc = super::ErrAcc { max_abs: max_z, max_rel: max_diff, count: quad.len() };
    b.finish(acc, 4.0)
}

/// E f(x_N) g(a x_N + b x_{N-1}) by sampling against <f, K_a g> by quadrature, for all pairs.
pub fn verify_geometric_scalar(
    n_particles: usize,
    a: f64,
    fs: &[&(dyn Fn(f64) -> f64 + Sync)],
    gs: &[&(dyn Fn(f64) -> f64 + Sync)],
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if n_particles < 3 {
        return Err(Error::ParameterDomain(format!("scalar case needs N >= 3, got {n_particles}")));
    }
    if !(a.abs() < 1.0) {
        return Err(Error::ParameterDomain(format!("need |a| < 1, got {a}")));
    }
    let gamma = (n_particles as f64 - 2.0) / 2.0;
    let op = UltrasphericalOp::new(gamma, a, QUAD_NODES)?;
    let rule = ultraspherical_rule(gamma, QUAD_NODES)?;
    let mut quad = vec![];
    for f in fs {
        for g in gs {
            let mut s = 0.0;
            for (t, w) in rule.pairs() {
                s += w * f(t) * op.apply(*g, t)?;
            }
            quad.push(s);
        }
    }
    let b = (1.0 - a * a).sqrt();
    let n = n_particles;
    let mc = mc_pairs(n, samples, seed, fs.len(), gs.len(), |x, fv, gv| {
        let (t, s) = (x[n - 1], x[n - 2]);
        fs.iter().zip(fv.iter_mut()).for_each(|(f, o)| *o = f(t));
        let u = a * t + b * s;
        gs.iter().zip(gv.iter_mut()).for_each(|(g, o)| *o = g(u));
    })?;
    Ok(finish(start, "geometric_scalar", &[("N", n as f64), ("gamma", gamma), ("a", a)], samples, seed, &quad, &mc))
}

struct BallEval {
    basis: Vec<BallBasisFn>,
    fams: Vec<PolynomialFamily<f64>>,
    beta: f64,
}

impl BallEval {
    fn eval(&self, v: &[f64], out: &mut [f64]) {
        let r2: f64 = v.iter().map(|x| x * x).sum();
        let r = r2.sqrt();
        let lmax = self.fams.len() - 1;
        let zonal = if r > 0.0 {
            zonal_upto(self.beta, lmax, (v[0] / r).clamp(-1.0, 1.0)).unwrap_or_default()
        } else {
            vec![0.0; lmax + 1]
        };
        for (o, bf) in out.iter_mut().zip(&self.basis) {
            let radial = self.fams[bf.ell].eval(bf.n, 2.0 * r2 - 1.0).unwrap_or(f64::NAN);
            let h = match bf.harmonic {
                Harmonic::Zonal if bf.ell == 0 => 1.0,
                Harmonic::Zonal => r.powi(bf.ell as i32) * zonal[bf.ell],
                Harmonic::SecondAxis => v[1],
            };
            *o = radial * h;
        }
    }
}

/// The matrix-sampling form of <f, K g> on the ball for all pairs of basis functions of
/// degree <= max_degree; the quadrature side uses K_{a,l} on the radial parts.
pub fn verify_geometric_ball(
    m: usize,
    n_particles: usize,
    a: f64,
    max_degree: usize,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let params = geometric_params(m, n_particles)?;
    if !(a.abs() < 1.0) {
        return Err(Error::ParameterDomain(format!("need |a| < 1, got {a}")));
    }
    let (alpha, beta) = (params.alpha, params.beta);
    let basis = ball_basis(max_degree);
    let fams = (0..=max_degree)
        .map(|l| PolynomialFamily::jacobi(alpha, beta + l as f64, Normalization::Orthonormal))
        .collect::<Result<Vec<_>>>()?;

    // <H, H>_sigma for each harmonic type
    let sphere = ultraspherical_rule(beta, QUAD_NODES)?;
    let mut zonal_norm = vec![0.0; max_degree + 1];
    for (s, w) in sphere.pairs() {
        let z = zonal_upto(beta, max_degree, s)?;
        zonal_norm.iter_mut().zip(&z).for_each(|(acc, p)| *acc += w * p * p);
    }
    let radial = gauss_jacobi_rule(&params, QUAD_NODES)?;
    let ops = (0..=max_degree)
        .map(|l| GasperOp::new(alpha, beta, l, a, QUAD_NODES, QUAD_NODES))
        .collect::<Result<Vec<_>>>()?;
    let mut quad = vec![];
    for f in &basis {
        for g in &basis {
            if f.ell != g.ell || f.harmonic != g.harmonic {
                quad.push(0.0);
                continue;
            }
            let l = f.ell;
            let hh = match f.harmonic {
                Harmonic::Zonal => zonal_norm[l],
                Harmonic::SecondAxis => 1.0 / m as f64,
            };
            let fam = &fams[l];
            let h2 = |x: f64| fam.eval(g.n, x).unwrap_or(f64::NAN);
            let mut s = 0.0;
            for (x, w) in radial.pairs() {
                s += w * (1.0 + x).powi(l as i32) * fam.eval(f.n, x)? * ops[l].apply(&h2, x)?;
            }
            quad.push(hh * s / 2f64.powi(l as i32));
        }
    }

    let b = (1.0 - a * a).sqrt();
    let ev = BallEval { basis, fams, beta };
    let nb = ev.basis.len();
    let n = n_particles;
    let mc = mc_pairs(m * (n - 1), samples, seed, nb, nb, |x, fv, gv| {
        let v1 = &x[(n - 2) * m..(n - 1) * m];
        let w = &x[(n - 3) * m..(n - 2) * m];
        let v2: Vec<f64> = v1.iter().zip(w).map(|(p, q)| a * p + b * q).collect();
        ev.eval(v1, fv);
        ev.eval(&v2, gv);
    })?;
    let p = [("m", m as f64), ("N", n as f64), ("alpha", alpha), ("beta", beta), ("a", a)];
    Ok(finish(start, "geometric_ball", &p, samples, seed, &quad, &mc))
}

/// Dispatches to the scalar case (orthonormal basis of degree <= 3) or the ball case.
pub fn verify_geometric_form(case: GeometricCase, a: f64, samples: usize, seed: u64) -> Result<VerificationReport> {
    match case {
        GeometricCase::Scalar { n } => {
            if n < 3 {
                return Err(Error::ParameterDomain(format!("scalar case needs N >= 3, got {n}")));
            }
            let fam = PolynomialFamily::ultraspherical((n as f64 - 2.0) / 2.0, Normalization::Orthonormal)?;
            let basis: Vec<Box<dyn Fn(f64) -> f64 + Sync>> = (0..=3)
                .map(|k| {
                    let fam = fam.clone();
                    Box::new(move |t: f64| fam.eval(k, t).unwrap_or(f64::NAN)) as Box<dyn Fn(f64) -> f64 + Sync>
                })
                .collect();
            let refs: Vec<&(dyn Fn(f64) -> f64 + Sync)> = basis.iter().map(|b| b.as_ref()).collect();
            verify_geometric_scalar(n, a, &refs, &refs, samples, seed)
        }
        GeometricCase::Ball { m, n } => verify_geometric_ball(m, n, a, 3, samples, seed),
    }
}
