//! Owen-scrambled Sobol points and inverse-CDF maps onto Beta laws.

use crate::special::{inc_beta, ln_beta};
use crate::{Error, Result};

/// Scrambled Sobol point `index` in `dims` dimensions for replicate `seed`.
pub fn sobol_point(index: u32, seed: u32, out: &mut [f64]) {
    for (d, v) in out.iter_mut().enumerate() {
        let s = sobol_burley::sample(index, d as u32, seed) as f64;
        // center in the 2^-24 cell so the value never hits 0
        *v = s + 2f64.powi(-25);
    }
}

pub const MAX_QMC_DIMS: usize = 256;

/// Quantile function of Beta(a, b) on [0, 1].
#[derive(Clone, Debug)]
pub struct BetaQuantile {
    pub a: f64,
    pub b: f64,
    ln_norm: f64,
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl BetaQuantile {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::ParameterDomain(format!("Beta law needs a, b > 0, got ({a}, {b})")));
        }
        let k = 1 << 14;
        let xs: Vec<f64> =
            (0..=k).map(|i| 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / k as f64).cos())).collect();
        let cdf = xs.iter().map(|&x| inc_beta(a, b, x)).collect();
        Ok(Self { a, b, ln_norm: ln_beta(a, b), xs, cdf })
    }

    fn pdf(&self, x: f64) -> f64 {
        ((self.a - 1.0) * x.ln() + (self.b - 1.0) * (1.0 - x).ln() - self.ln_norm).exp()
    }

    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let i = self.cdf.partition_point(|c| *c < u).clamp(1, self.xs.len() - 1);
        let (x0, x1, c0, c1) = (self.xs[i - 1], self.xs[i], self.cdf[i - 1], self.cdf[i]);
        let last = self.xs.len() - 1;
        let mut x = if i == 1 {
            // power-law tails: I_x ~ x^a / (a B(a, b)) near 0
            (self.a.ln() + self.ln_norm + u.ln()).mul_add(1.0 / self.a, 0.0).exp().min(x1)
        } else if i == last {
            1.0 - (self.b.ln() + self.ln_norm + (1.0 - u).ln()).mul_add(1.0 / self.b, 0.0).exp().min(1.0 - x0)
        } else if c1 > c0 {
            x0 + (x1 - x0) * (u - c0) / (c1 - c0)
        } else {
            0.5 * (x0 + x1)
        };
        for _ in 0..4 {
            if !(x > 0.0 && x < 1.0) {
                break;
            }
            let f = inc_beta(self.a, self.b, x) - u;
            let p = self.pdf(x);
            if !(p > 0.0) || !p.is_finite() {
                break;
            }
            let next = x - f / p;
            if next > x0 && next < x1 {
                x = next;
            } else {
                break;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_inverts_cdf() {
        for &(a, b) in &[(0.5, 0.5), (1.0, 1.0), (2.5, 0.75), (1.5, 3.0)] {
            let q = BetaQuantile::new(a, b).unwrap();
            for &u in &[1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
                let x = q.quantile(u);
                assert!((inc_beta(a, b, x) - u).abs() < 1e-10, "a={a} b={b} u={u}");
            }
        }
        let q = BetaQuantile::new(1.0, 1.0).unwrap();
        assert!((q.quantile(0.25) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sobol_points_in_unit_cube() {
        let mut p = [0.0; 7];
        for i in 0..64 {
            sobol_point(i, 9, &mut p);
            assert!(p.iter().all(|v| *v > 0.0 && *v < 1.0));
        }
    }
}
