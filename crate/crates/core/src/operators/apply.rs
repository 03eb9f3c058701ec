//! Quadrature realizations of K_a, K_{a,0} and K_{a,l}.

use crate::orthopoly::zonal_upto;
use crate::quadrature::{disk_rule_closure, ultraspherical_rule, QuadratureRule, DEFAULT_NODES};
use crate::special::{binomial, c_gamma};
use crate::{Error, Real, Result};

/// An operator of the form (K h)(t) = sum_k w_k(t) h(x_k(t)).
pub trait NodeOperator<T: Real> {
    /// Calls `visit(argument, weight)` for every quadrature node at the point t.
    fn visit_nodes(&self, t: T, visit: &mut dyn FnMut(T, T)) -> Result<()>;

    fn apply(&self, h: &dyn Fn(T) -> T, t: T) -> Result<T> {
        let mut acc = T::zero();
        self.visit_nodes(t, &mut |x, w| acc = acc + w * h(x))?;
        Ok(acc)
    }
}

fn check_a<T: Real>(a: T) -> Result<T> {
    if !(a.abs() <= T::one()) {
        return Err(Error::ParameterDomain(format!("need |a| <= 1, got {a}")));
    }
    Ok((T::one() - a * a).max(T::zero()).sqrt())
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if !(t.abs() <= T::one()) {
        return Err(Error::Domain(format!("operator argument t = {t} outside [-1, 1]")));
    }
    Ok(())
}

/// K_a h(t) = int h(a t + s b sqrt(1 - t^2)) d mu^{(gamma - 1/2)}(s).
#[derive(Clone, Debug)]
pub struct UltrasphericalOp<T> {
    pub gamma: T,
    pub a: T,
    b: T,
    rule: QuadratureRule<T>,
}

impl<T: Real> UltrasphericalOp<T> {
    pub fn new(gamma: T, a: T, nodes: usize) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::ParameterDomain(format!("K_a needs gamma > 0, got {gamma}")));
        }
        let b = check_a(a)?;
        let rule = ultraspherical_rule(gamma - T::lit(0.5), nodes)?;
        Ok(Self { gamma, a, b, rule })
    }

    /// Uses a caller-supplied rule, which must be for mu^{(gamma - 1/2)}.
    pub fn with_rule(gamma: T, a: T, rule: QuadratureRule<T>) -> Result<Self> {
        if rule.dimension != 1 {
            return Err(Error::InvalidInput("K_a needs a one-dimensional rule for mu^(gamma-1/2)".into()));
        }
        let b = check_a(a)?;
        Ok(Self { gamma, a, b, rule })
    }
}

impl<T: Real> NodeOperator<T> for UltrasphericalOp<T> {
    fn visit_nodes(&self, t: T, visit: &mut dyn FnMut(T, T)) -> Result<()> {
        check_t(t)?;
        if self.a.abs() == T::one() {
            visit(self.a * t, T::one());
            return Ok(());
        }
        let spread = self.b * (T::one() - t * t).max(T::zero()).sqrt();
        for (s, w) in self.rule.pairs() {
            visit(self.a * t + s * spread, w);
        }
        Ok(())
    }
}

/// K_{a,l}: the disk integral with the binomial/zonal bracket; l = 0 gives K_{a,0}.
#[derive(Clone, Debug)]
pub struct GasperOp<T> {
    pub alpha: T,
    pub beta: T,
    pub ell: usize,
    pub a: T,
    b: T,
    disk: QuadratureRule<T>,
    // P_j^{(beta)}(cos theta) per disk node, j = 0..=ell
    zonal: Vec<Vec<T>>,
    binom: Vec<T>,
}

impl<T: Real> GasperOp<T> {
    pub fn new(alpha: T, beta: T, ell: usize, a: T, n_r: usize, n_theta: usize) -> Result<Self> {
        let half = T::lit(0.5);
        let regime = (alpha >= beta && beta > -half) || (alpha > beta && beta == -half);
        if !regime {
            return Err(Error::Regime(format!(
                "K_(a,l) needs alpha >= beta > -1/2 (or alpha > beta = -1/2), got ({alpha}, {beta})"
            )));
        }
        let b = check_a(a)?;
        let disk = disk_rule_closure(alpha, beta, n_r, n_theta)?;
        let zonal = if ell == 0 {
            vec![vec![T::one()]; disk.len()]
        } else {
            (0..disk.len()).map(|k| zonal_upto(beta, ell, disk.node(k)[1])).collect::<Result<_>>()?
        };
        let binom = (0..=ell).map(|j| T::lit(binomial(ell, j))).collect();
        Ok(Self { alpha, beta, ell, a, b, disk, zonal, binom })
    }

    pub fn with_default_nodes(alpha: T, beta: T, ell: usize, a: T) -> Result<Self> {
        Self::new(alpha, beta, ell, a, DEFAULT_NODES, DEFAULT_NODES)
    }
}

impl<T: Real> NodeOperator<T> for GasperOp<T> {
    fn visit_nodes(&self, t: T, visit: &mut dyn FnMut(T, T)) -> Result<()> {
        check_t(t)?;
        let one = T::one();
        if self.ell > 0 && t == -one {
            return Err(Error::Singular("K_(a,l) with l > 0 is singular at t = -1".into()));
        }
        if self.a.abs() == one {
            visit(t, self.a.powi(self.ell as i32));
            return Ok(());
        }
        let (a, b) = (self.a, self.b);
        let two = T::lit(2.0);
        let sq = (one - t * t).max(T::zero()).sqrt();
        let ratio = if self.ell > 0 { ((one - t) / (one + t)).max(T::zero()).sqrt() } else { T::zero() };
        let base = a * a * (one + t) - one;
        let mut apow = vec![one; self.ell + 1];
        for j in 1..=self.ell {
            apow[j] = apow[j - 1] * a;
        }
        for k in 0..self.disk.len() {
            let node = self.disk.node(k);
            let (r, c) = (node[0], node[1]);
            let arg = base + b * b * (one - t) * r * r + two * a * b * r * sq * c;
            let mut bracket = one;
            if self.ell > 0 {
                bracket = T::zero();
                let step = b * r * ratio;
                let mut pw = one;
                for j in 0..=self.ell {
                    bracket = bracket + self.binom[j] * apow[self.ell - j] * pw * self.zonal[k][j];
                    pw = pw * step;
                }
            }
            visit(arg, self.disk.weights[k] * bracket);
        }
        Ok(())
    }
}

/// K_a h(t) with the default 64-node rule.
pub fn apply_ka<T: Real>(gamma: T, a: T, h: &dyn Fn(T) -> T, t: T) -> Result<T> {
    UltrasphericalOp::new(gamma, a, DEFAULT_NODES)?.apply(h, t)
}

/// K_{a,0} h(t) with the default 64 x 64 disk rule; needs alpha > beta > -1/2.
pub fn apply_ka0<T: Real>(alpha: T, beta: T, a: T, h: &dyn Fn(T) -> T, t: T) -> Result<T> {
    strict_gasper(alpha, beta)?;
    GasperOp::with_default_nodes(alpha, beta, 0, a)?.apply(h, t)
}

/// K_{a,l} h(t) with the default 64 x 64 disk rule; needs alpha > beta > -1/2.
pub fn apply_kal<T: Real>(alpha: T, beta: T, ell: usize, a: T, h: &dyn Fn(T) -> T, t: T) -> Result<T> {
    strict_gasper(alpha, beta)?;
    GasperOp::with_default_nodes(alpha, beta, ell, a)?.apply(h, t)
}

fn strict_gasper<T: Real>(alpha: T, beta: T) -> Result<()> {
    if !(alpha > beta && beta > -T::lit(0.5)) {
        return Err(Error::ParameterDomain(format!("need alpha > beta > -1/2, got ({alpha}, {beta})")));
    }
    Ok(())
}

/// Density of K_a with respect to mu^{(gamma)} x mu^{(gamma)}.
pub fn kernel_ka<T: Real>(gamma: T, a: T, t: T, u: T) -> Result<T> {
    let lebesgue = kernel_ka_lebesgue(gamma, a, t, u)?;
    if lebesgue == T::zero() {
        return Ok(lebesgue);
    }
    let h = T::lit(0.5);
    let cg = T::lit(c_gamma(gamma.to_f64().unwrap()));
    let wt = (T::one() - t * t).powf(gamma - h);
    let wu = (T::one() - u * u).powf(gamma - h);
    Ok(lebesgue / (cg * cg * wt * wu))
}

/// Density of (f, g) -> <K_a f, g> with respect to du dt.
pub fn kernel_ka_lebesgue<T: Real>(gamma: T, a: T, t: T, u: T) -> Result<T> {
    if !(gamma > T::zero()) {
        return Err(Error::ParameterDomain(format!("kernel needs gamma > 0, got {gamma}")));
    }
    if !(a.abs() < T::one()) {
        return Err(Error::Singular(format!("K_a has no kernel density at |a| = 1 (a = {a})")));
    }
    check_t(t)?;
    check_t(u)?;
    let one = T::one();
    let b2 = one - a * a;
    let q = b2 - (u * u + t * t - T::lit(2.0) * a * t * u);
    if !(q > T::zero()) {
        return Ok(T::zero());
    }
    let g = gamma.to_f64().unwrap();
    let consts = T::lit(c_gamma(g) * c_gamma(g - 0.5));
    Ok(consts * q.powf(gamma - one) / b2.powf(gamma - T::lit(0.5)))
}
