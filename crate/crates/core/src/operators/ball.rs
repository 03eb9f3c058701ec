//! The ball operator f(v) -> E f(a v + b sqrt(1 - |v|^2) y).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{geometric_params, OperatorSpec};
use crate::quadrature::sampling::{chunks, Moments};
use crate::quadrature::{ball_block_sample, SphereSampler, DEFAULT_NODES};
use crate::{Error, Result};

pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BallIntegrator {
    MonteCarlo { samples: usize, seed: u64 },
    RadialReduction,
}

/// Ball operator on R^m for m-blocks of N-particle configurations.
///
/// The invariant law is one m-block of a uniform point on S^{m(N-1)-1} and the
/// kernel law one m-block of a uniform point on S^{m(N-2)-1}, so that the radial
/// part is K_{a,0} with the parameters from `geometric_params`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallOperator {
    pub m: usize,
    pub n: usize,
    pub a: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl BallOperator {
    pub fn new(m: usize, n: usize, a: f64) -> Result<Self> {
        geometric_params(m, n)?;
        if !(a.abs() <= 1.0) {
            return Err(Error::ParameterDomain(format!("need |a| <= 1, got {a}")));
        }
        Ok(Self { m, n, a })
    }

    fn check_point(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.m {
            return Err(Error::InvalidInput(format!("point has {} coordinates, expected {}", v.len(), self.m)));
        }
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("|v|^2 = {r2} exceeds 1")));
        }
        Ok(r2.min(1.0))
    }

    pub fn apply_mc(&self, f: &(dyn Fn(&[f64]) -> f64 + Sync), v: &[f64], samples: usize, seed: u64) -> Result<McEstimate> {
        let r2 = self.check_point(v)?;
        if samples < 2 {
            return Err(Error::InvalidInput("Monte Carlo needs at least two samples".into()));
        }
        let b = (1.0 - self.a * self.a).max(0.0).sqrt();
        let spread = b * (1.0 - r2).sqrt();
        let sampler = SphereSampler { d: self.m * (self.n - 2), seed };
        let parts: Vec<Moments> = chunks(samples)
            .into_par_iter()
            .map(|(k, count)| {
                let mut rng = sampler.stream(k);
                let mut y = vec![0.0; self.m];
                let mut x = vec![0.0; self.m];
                let mut mom = Moments::default();
                for _ in 0..count {
                    ball_block_sample(self.m, self.n - 2, &mut rng, &mut y);
                    for i in 0..self.m {
                        x[i] = self.a * v[i] + spread * y[i];
                    }
                    mom.push(f(&x));
                }
                mom
            })
            .collect();
        let mut total = Moments::default();
        parts.iter().for_each(|p| total.merge(p));
        Ok(McEstimate { mean: total.mean(), std_error: total.std_error(), samples })
    }

    /// Radial f only: f(v) = h(2|v|^2 - 1), evaluated through K_{a,0}.
    pub fn apply_radial(&self, f: &dyn Fn(&[f64]) -> f64, v: &[f64]) -> Result<f64> {
        let r2 = self.check_point(v)?;
        let m = self.m;
        let along = |axis: usize, rho: f64| {
            let mut p = vec![0.0; m];
            p[axis] = rho;
            f(&p)
        };
        for &rho in &[0.3, 0.71, 0.95] {
            let f0 = along(0, rho);
            let mut diag = vec![rho / (m as f64).sqrt(); m];
            diag[m - 1] = -diag[m - 1];
            let others = [along(m - 1, rho), f(&diag)];
            if others.iter().any(|x| (x - f0).abs() > 1e-12 * (1.0 + f0.abs())) {
                return Err(Error::InvalidInput("radial reduction needs a radial function".into()));
            }
        }
        let h = |x: f64| along(0, ((1.0 + x) / 2.0).max(0.0).sqrt());
        let op = OperatorSpec::BallKa { m: self.m, n: self.n, a: self.a }.realize(DEFAULT_NODES)?;
        op.apply(&h, 2.0 * r2 - 1.0)
    }
}

pub fn apply_ball_op(
    op: &BallOperator,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    v: &[f64],
    integrator: BallIntegrator,
) -> Result<McEstimate> {
    match integrator {
        BallIntegrator::MonteCarlo { samples, seed } => op.apply_mc(f, v, samples, seed),
        BallIntegrator::RadialReduction => {
            Ok(McEstimate { mean: op.apply_radial(f, v)?, std_error: 0.0, samples: 0 })
        }
    }
}
