//! Quadrature rules and samplers for the probability measures used by the operators.

use serde::{Deserialize, Serialize};

use crate::linalg::tridiagonal_eigenvalues;
use crate::orthopoly::{recurrence_coeffs, JacobiParams};
use crate::{Error, Real, Result};

pub mod qmc;
pub mod sampling;
pub mod sequences;

pub use sampling::{ball_block_sample, SphereSampler};
pub use sequences::{convolve_sequences, MarkovSequenceCoefficients};

pub const DEFAULT_NODES: usize = 64;
pub const TENSOR_NODE_CAP: usize = 10_000_000;

/// Nodes and weights; `nodes` is row-major with `dimension` coordinates per point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule<T> {
    pub dimension: usize,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn new(dimension: usize, nodes: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if dimension == 0 || nodes.len() != dimension * weights.len() {
            return Err(Error::InvalidInput(format!(
                "rule of dimension {dimension} with {} coordinates and {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > T::zero())) {
            return Err(Error::InvalidInput("quadrature weights must be positive".into()));
        }
        Ok(Self { dimension, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[T] {
        &self.nodes[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn integrate<F: FnMut(&[T]) -> T>(&self, mut f: F) -> T {
        let mut acc = T::zero();
        for i in 0..self.len() {
            acc = acc + self.weights[i] * f(self.node(i));
        }
        acc
    }

    /// One-dimensional rules only: (node, weight) pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (T, T)> + '_ {
        assert_eq!(self.dimension, 1, "pairs() needs a one-dimensional rule");
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Affine image of a 1D rule on [-1, 1] onto [lo, hi]; weights unchanged.
    pub fn mapped(&self, lo: T, hi: T) -> Self {
        assert_eq!(self.dimension, 1);
        let h = T::lit(0.5);
        let nodes = self.nodes.iter().map(|&x| lo + (hi - lo) * h * (x + T::one())).collect();
        Self { dimension: 1, nodes, weights: self.weights.clone() }
    }

    pub fn to_json(&self) -> Result<String>
    where
        T: Serialize,
    {
        Ok(serde_json::to_string(self)?)
    }
}

/// Gauss rule for the probability measure mu^{alpha,beta} on [-1, 1] (Golub-Welsch).
pub fn gauss_jacobi_rule<T: Real>(params: &JacobiParams<T>, npoints: usize) -> Result<QuadratureRule<T>> {
    if npoints == 0 {
        return Err(Error::InvalidInput("a Gauss rule needs at least one node".into()));
    }
    let tab = recurrence_coeffs(params, npoints)?;
    let diag: Vec<T> = tab.shift[..npoints].to_vec();
    let off: Vec<T> = tab.coupling[1..npoints].iter().map(|b| b.sqrt()).collect();
    let mut nodes = tridiagonal_eigenvalues(&diag, &off)?;
    let sq: Vec<T> = tab.coupling.iter().map(|b| b.sqrt()).collect();
    let n = npoints;
    // Newton polish on the orthonormal p_n, then Christoffel weights
    let polish = |x: T| -> (T, T, T) {
        let (mut p0, mut p1) = (T::zero(), T::one());
        let (mut d0, mut d1) = (T::zero(), T::zero());
        let mut sum = T::one();
        for k in 0..n {
            let p2 = ((x - tab.shift[k]) * p1 - sq[k] * p0) / sq[k + 1];
            let d2 = (p1 + (x - tab.shift[k]) * d1 - sq[k] * d0) / sq[k + 1];
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
            if k + 1 < n {
                sum = sum + p1 * p1;
            }
        }
        (p1, d1, sum)
    };
    for i in 0..n {
        let gap = {
            let lo = if i > 0 { nodes[i] - nodes[i - 1] } else { T::one() };
            let hi = if i + 1 < n { nodes[i + 1] - nodes[i] } else { T::one() };
            lo.min(hi)
        };
        let mut x = nodes[i];
        for _ in 0..3 {
            let (p, dp, _) = polish(x);
            if dp == T::zero() {
                break;
            }
            let dx = p / dp;
            if !(dx.abs() < T::lit(0.1) * gap) {
                break;
            }
            x = x - dx;
            if dx.abs() <= T::epsilon() * x.abs().max(T::one()) {
                break;
            }
        }
        nodes[i] = x;
    }
    let mut weights: Vec<T> = nodes.iter().map(|&x| T::one() / polish(x).2).collect();
    let total: T = weights.iter().copied().sum();
    for w in weights.iter_mut() {
        *w = *w / total;
    }
    QuadratureRule::new(1, nodes, weights)
        .map_err(|e| Error::Numerical(format!("Gauss-Jacobi construction failed: {e}")))
}

/// Gauss rule for mu^{(gamma)}, weight proportional to (1 - t^2)^(gamma - 1/2).
pub fn ultraspherical_rule<T: Real>(gamma: T, npoints: usize) -> Result<QuadratureRule<T>> {
    if !(gamma > -T::lit(0.5)) {
        return Err(Error::ParameterDomain(format!("mu^(gamma) needs gamma > -1/2, got {gamma}")));
    }
    let h = T::lit(0.5);
    gauss_jacobi_rule(&JacobiParams::new(gamma - h, gamma - h)?, npoints)
}

/// Gauss rule on [0, 1] for the probability measure proportional to (1 - u)^a u^b du.
pub fn unit_interval_rule<T: Real>(a: T, b: T, npoints: usize) -> Result<QuadratureRule<T>> {
    Ok(gauss_jacobi_rule(&JacobiParams::new(a, b)?, npoints)?.mapped(T::zero(), T::one()))
}

/// Rule for m_{alpha,beta}(r, theta); points are stored as (r, cos theta).
pub fn disk_rule<T: Real>(alpha: T, beta: T, n_r: usize, n_theta: usize) -> Result<QuadratureRule<T>> {
    if !(alpha > beta && beta > -T::lit(0.5)) {
        return Err(Error::ParameterDomain(format!(
            "disk measure needs alpha > beta > -1/2, got ({alpha}, {beta})"
        )));
    }
    disk_rule_closure(alpha, beta, n_r, n_theta)
}

/// Disk rule extended to the boundary of the regime: alpha = beta puts all radial
/// mass at r = 1, and beta = -1/2 puts the angular mass at cos theta = +-1.
pub fn disk_rule_closure<T: Real>(alpha: T, beta: T, n_r: usize, n_theta: usize) -> Result<QuadratureRule<T>> {
    let half = T::lit(0.5);
    if !(alpha >= beta && beta >= -half) || (alpha == beta && beta == -half) {
        return Err(Error::Regime(format!(
            "disk measure needs alpha >= beta >= -1/2, not both equalities; got ({alpha}, {beta})"
        )));
    }
    if n_r == 0 || n_theta == 0 {
        return Err(Error::InvalidInput("disk rule needs at least one node per axis".into()));
    }
    let radial: (Vec<T>, Vec<T>) = if alpha == beta {
        (vec![T::one()], vec![T::one()])
    } else {
        let rule = unit_interval_rule(alpha - beta - T::one(), beta, n_r)?;
        (rule.nodes.iter().map(|u| u.sqrt()).collect(), rule.weights)
    };
    let angular: (Vec<T>, Vec<T>) = if beta == -half {
        (vec![-T::one(), T::one()], vec![half, half])
    } else {
        let rule = ultraspherical_rule(beta, n_theta)?;
        (rule.nodes, rule.weights)
    };
    let mut nodes = Vec::with_capacity(2 * radial.0.len() * angular.0.len());
    let mut weights = Vec::with_capacity(radial.0.len() * angular.0.len());
    for (r, wr) in radial.0.iter().zip(&radial.1) {
        for (t, wt) in angular.0.iter().zip(&angular.1) {
            nodes.push(*r);
            nodes.push(*t);
            weights.push(*wr * *wt);
        }
    }
    QuadratureRule::new(2, nodes, weights)
}

/// Tensor product of rules, capped at `TENSOR_NODE_CAP` points.
pub fn tensor_rule<T: Real>(rules: &[&QuadratureRule<T>]) -> Result<QuadratureRule<T>> {
    tensor_rule_capped(rules, TENSOR_NODE_CAP)
}

pub fn tensor_rule_capped<T: Real>(rules: &[&QuadratureRule<T>], cap: usize) -> Result<QuadratureRule<T>> {
    if rules.is_empty() {
        return Err(Error::InvalidInput("tensor product of no rules".into()));
    }
    let count = rules.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len()));
    match count {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::Resource(format!(
                "tensor rule would have more than {cap} nodes; use the qmc integrator instead"
            )))
        }
    }
    let dim: usize = rules.iter().map(|r| r.dimension).sum();
    let mut nodes = vec![];
    let mut weights = vec![T::one()];
    let mut cur_dim = 0;
    for rule in rules {
        let mut next_nodes = Vec::with_capacity(weights.len() * rule.len() * (cur_dim + rule.dimension));
        let mut next_w = Vec::with_capacity(weights.len() * rule.len());
        for (i, w) in weights.iter().enumerate() {
            for j in 0..rule.len() {
                next_nodes.extend_from_slice(&nodes[i * cur_dim..(i + 1) * cur_dim]);
                next_nodes.extend_from_slice(rule.node(j));
                next_w.push(*w * rule.weights[j]);
            }
        }
        nodes = next_nodes;
        weights = next_w;
        cur_dim += rule.dimension;
    }
    QuadratureRule::new(dim, nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_three_point() {
        let r = gauss_jacobi_rule(&JacobiParams::new(0.0f64, 0.0).unwrap(), 3).unwrap();
        let x = (0.6f64).sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15 && r.nodes[1].abs() < 1e-15 && (r.nodes[2] - x).abs() < 1e-15);
        assert!((r.weights[0] - 5.0 / 18.0).abs() < 1e-15 && (r.weights[1] - 8.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn f32_rule_works() {
        let r = ultraspherical_rule(1.0f32, 16).unwrap();
        let m2: f32 = r.pairs().map(|(t, w)| w * t * t).sum();
        assert!((m2 - 0.25).abs() < 1e-6);
    }

    #[test]
    fn degenerate_disk_closures() {
        let r = disk_rule_closure(0.5f64, 0.5, 8, 8).unwrap();
        assert!(r.nodes.chunks(2).all(|p| p[0] == 1.0));
        let r = disk_rule_closure(1.0f64, -0.5, 8, 8).unwrap();
        assert!(r.nodes.chunks(2).all(|p| p[1].abs() == 1.0));
        assert!(disk_rule(0.5f64, 0.5, 4, 4).is_err());
    }

    #[test]
    fn tensor_cap() {
        let r = ultraspherical_rule(1.0f64, 100).unwrap();
        assert!(matches!(tensor_rule(&[&r, &r, &r, &r]), Err(Error::Resource(_))));
        let t = tensor_rule(&[&r, &r]).unwrap();
        assert_eq!(t.dimension, 2);
        assert_eq!(t.len(), 10_000);
    }
}
