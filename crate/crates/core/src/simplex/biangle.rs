use rayon::prelude::*;

use super::{d_raw, e_raw, sqrt_point, BiangleIndex, BianglePoint};
use crate::orthopoly::{JacobiParams, Normalization, PolynomialFamily};
use crate::quadrature::{disk_rule, ultraspherical_rule, unit_interval_rule, QuadratureRule};
use crate::verify::{ErrAcc, VerificationReport};
use crate::{Error, Result};

/// r_{n,m}(x1, x2) = x1^{n/2} p_m^{(alpha, beta+n)}(2 x1 - 1) p_n^{(beta)}(x2 / sqrt(x1)).
#[derive(Clone, Debug)]
pub struct BiangleFamily {
    pub alpha: f64,
    pub beta: f64,
    pub normalization: Normalization,
    angular: PolynomialFamily<f64>,
    radial: Vec<PolynomialFamily<f64>>,
}

impl BiangleFamily {
    pub fn new(alpha: f64, beta: f64, max_degree: usize, normalization: Normalization) -> Result<Self> {
        if !(alpha > -1.0 && beta > -0.5) {
            return Err(Error::ParameterDomain(format!("biangle needs alpha > -1, beta > -1/2, got ({alpha}, {beta})")));
        }
        let angular = PolynomialFamily::with_max_degree(JacobiParams::new(beta - 0.5, beta - 0.5)?, normalization, max_degree)?;
        let radial = (0..=max_degree)
            .map(|n| PolynomialFamily::with_max_degree(JacobiParams::new(alpha, beta + n as f64)?, normalization, max_degree))
            .collect::<Result<_>>()?;
        Ok(Self { alpha, beta, normalization, angular, radial })
    }

    pub fn max_degree(&self) -> usize {
        self.radial.len() - 1
    }

    /// Values at x1 = rho^2, x2 = rho s for all indices n + m <= max_degree, as table[n][m].
    pub fn eval_polar(&self, rho: f64, s: f64) -> Vec<Vec<f64>> {
        let d = self.max_degree();
        let mut ang = vec![0.0; d + 1];
        self.angular.fill(s.clamp(-1.0, 1.0), &mut ang);
        let x = 2.0 * rho * rho - 1.0;
        let mut pw = 1.0;
        (0..=d)
            .map(|n| {
                let mut rad = vec![0.0; d - n + 1];
                self.radial[n].fill(x, &mut rad);
                let scale = pw * ang[n];
                pw *= rho;
                rad.iter().map(|v| v * scale).collect()
            })
            .collect()
    }

    pub fn eval(&self, idx: BiangleIndex, p: BianglePoint) -> Result<f64> {
        if idx.total_degree() > self.max_degree() {
            return Err(Error::DegreeOutOfRange { requested: idx.total_degree(), max: self.max_degree() });
        }
        BianglePoint::new(p.x1, p.x2)?;
        if p.x1 <= 0.0 {
            // continuous extension at the cusp
            return Ok(if idx.n == 0 { self.radial[0].eval(idx.m, -1.0)? * self.angular.eval(0, 0.0)? } else { 0.0 });
        }
        let rho = p.x1.sqrt();
        Ok(self.eval_polar(rho, p.x2 / rho)[idx.n][idx.m])
    }
}

pub fn biangle_poly(alpha: f64, beta: f64, idx: BiangleIndex, p: BianglePoint, normalization: Normalization) -> Result<f64> {
    BiangleFamily::new(alpha, beta, idx.total_degree(), normalization)?.eval(idx, p)
}

fn regime(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > beta && beta > 0.0) {
        return Err(Error::Regime(format!("biangle product formula needs alpha > beta > 0, got ({alpha}, {beta})")));
    }
    Ok(())
}

/// Quadrature for the measure dm_{alpha,beta}(r, t1) dmu(t2) dmu(t3) and the
/// map (x; y) -> (E, G) in square-root coordinates.
#[derive(Clone, Debug)]
pub struct BiangleOperator {
    pub alpha: f64,
    pub beta: f64,
    /// y = sqrt(y1), t = y2 / sqrt(y1)
    pub y: f64,
    pub t: f64,
    disk: QuadratureRule<f64>,
    angle: QuadratureRule<f64>,
}

impl BiangleOperator {
    /// Operator for the point (y1, y2) of the biangle.
    pub fn new(alpha: f64, beta: f64, pt_y: BianglePoint, nodes: usize) -> Result<Self> {
        BianglePoint::new(pt_y.x1, pt_y.x2)?;
        if pt_y.x1 <= 0.0 {
            return Err(Error::Domain("operator point must have y1 > 0".into()));
        }
        let y = pt_y.x1.sqrt();
        Self::polar(alpha, beta, y, pt_y.x2 / y, nodes)
    }

    fn polar(alpha: f64, beta: f64, y: f64, t: f64, nodes: usize) -> Result<Self> {
        regime(alpha, beta)?;
        Ok(Self {
            alpha,
            beta,
            y,
            t: t.clamp(-1.0, 1.0),
            disk: disk_rule(alpha, beta, nodes, nodes)?,
            angle: ultraspherical_rule(beta - 0.5, nodes)?,
        })
    }

    /// Calls visit(E, G, weight) for every node at the polar point (rho, s).
    pub fn visit(&self, rho: f64, s: f64, visit: &mut dyn FnMut(f64, f64, f64)) {
        let d2: Vec<f64> = self.angle.nodes.iter().map(|&t2| d_raw(s, self.t, 1.0, t2).clamp(-1.0, 1.0)).collect();
        for k in 0..self.disk.len() {
            let node = self.disk.node(k);
            let (r, t1) = (node[0], node[1]);
            let e = e_raw(rho, self.y, r, t1);
            let c = if e > 0.0 { (d_raw(rho, self.y, r, t1) / e).clamp(-1.0, 1.0) } else { 1.0 };
            let wk = self.disk.weights[k];
            for (j, dj) in d2.iter().enumerate() {
                let wj = wk * self.angle.weights[j];
                for (t3, w3) in self.angle.pairs() {
                    visit(e, d_raw(c, *dj, 1.0, t3), wj * w3);
                }
            }
        }
    }

    /// (K h)(x1, x2) = integral of h(E^2, E G).
    pub fn apply(&self, h: &dyn Fn(f64, f64) -> f64, p: BianglePoint) -> Result<f64> {
        BianglePoint::new(p.x1, p.x2)?;
        let rho = p.x1.sqrt();
        let s = if rho > 0.0 { p.x2 / rho } else { 0.0 };
        let mut acc = 0.0;
        self.visit(rho, s, &mut |e, g, w| acc += w * h(e * e, e * g));
        Ok(acc)
    }
}

/// r(x1^2, x2) r(y1^2, y2) / r(1, 1) against the integral of r(E^2, E G) for every
/// index of total degree <= max_degree. Points are in square-root coordinates.
pub fn verify_biangle_product(
    alpha: f64,
    beta: f64,
    max_degree: usize,
    pairs: &[((f64, f64), (f64, f64))],
    nodes: usize,
    tol: f64,
) -> Result<VerificationReport> {
    regime(alpha, beta)?;
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no point pairs".into()));
    }
    let start = std::time::Instant::now();
    let fam = BiangleFamily::new(alpha, beta, max_degree, Normalization::ValueOneAtOne)?;
    let corner = fam.eval_polar(1.0, 1.0);
    let mut acc = ErrAcc::default();
    for &(px, py) in pairs {
        let (x1, x2) = sqrt_point(px, false)?;
        let (y1, y2) = sqrt_point(py, false)?;
        let lx = fam.eval_polar(x1, x2 / x1);
        let ly = fam.eval_polar(y1, y2 / y1);
        let op = BiangleOperator::polar(alpha, beta, y1, y2 / y1, nodes)?;
        let mut rhs: Vec<Vec<f64>> = (0..=max_degree).map(|n| vec![0.0; max_degree - n + 1]).collect();
        op.visit(x1, x2 / x1, &mut |e, g, w| {
            let v = fam.eval_polar(e, g);
            for (row, vr) in rhs.iter_mut().zip(&v) {
                row.iter_mut().zip(vr).for_each(|(r, x)| *r += w * x);
            }
        });
        for n in 0..=max_degree {
            for m in 0..=max_degree - n {
                acc.push(lx[n][m] * ly[n][m] / corner[n][m], rhs[n][m]);
            }
        }
    }
    let mut params = std::collections::BTreeMap::new();
    params.insert("alpha".into(), alpha);
    params.insert("beta".into(), beta);
    params.insert("max_degree".into(), max_degree as f64);
    Ok(VerificationReport {
        identity_id: "biangle_product".into(),
        params,
        grid: format!("{} point pairs, {nodes}^4 nodes", pairs.len()),
        max_abs_err: acc.max_abs,
        max_rel_err: acc.max_rel,
        tolerance: tol,
        pass: acc.max_abs <= tol,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        extra: Default::default(),
        notes: vec![],
    })
}

/// Outer rule for the biangle inner product in (rho^2, s), probability-normalized.
fn outer_rule(alpha: f64, beta: f64, nodes: usize) -> Result<Vec<(f64, f64, f64)>> {
    let u = unit_interval_rule(alpha, beta, nodes)?;
    let s = ultraspherical_rule(beta, nodes)?;
    Ok(u.pairs().flat_map(|(u, wu)| s.pairs().map(move |(s, ws)| (u.sqrt(), s, wu * ws)).collect::<Vec<_>>()).collect())
}

/// Values of (K h_j) at every outer node, for all test functions at once.
fn applied(op: &BiangleOperator, outer: &[(f64, f64, f64)], hs: &[&(dyn Fn(f64, f64) -> f64 + Sync)]) -> Vec<Vec<f64>> {
    outer
        .par_iter()
        .map(|&(rho, s, _)| {
            let mut out = vec![0.0; hs.len()];
            op.visit(rho, s, &mut |e, g, w| {
                let (x1, x2) = (e * e, e * g);
                out.iter_mut().zip(hs).for_each(|(o, h)| *o += w * h(x1, x2));
            });
            out
        })
        .collect()
}

/// Largest |<h_i, K h_j> - <K h_i, h_j>| over all pairs of test functions.
#[allow(clippy::too_many_arguments)]
pub fn biangle_operator_selfadjoint(
    alpha: f64,
    beta: f64,
    hs: &[&(dyn Fn(f64, f64) -> f64 + Sync)],
    pt_y: BianglePoint,
    outer_nodes: usize,
    inner_nodes: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let start = std::time::Instant::now();
    let op = BiangleOperator::new(alpha, beta, pt_y, inner_nodes)?;
    let outer = outer_rule(alpha, beta, outer_nodes)?;
    let kh = applied(&op, &outer, hs);
    let n = hs.len();
    let mut m = vec![0.0; n * n];
    for (node, k) in outer.iter().zip(&kh) {
        let (x1, x2) = (node.0 * node.0, node.0 * node.1);
        for i in 0..n {
            let hi = hs[i](x1, x2);
            for j in 0..n {
                m[i * n + j] += node.2 * hi * k[j];
            }
        }
    }
    let mut acc = ErrAcc::default();
    for i in 0..n {
        for j in i + 1..n {
            acc.push(m[i * n + j], m[j * n + i]);
        }
    }
    let mut params = std::collections::BTreeMap::new();
    params.insert("alpha".into(), alpha);
    params.insert("beta".into(), beta);
    params.insert("y1".into(), pt_y.x1);
    params.insert("y2".into(), pt_y.x2);
    Ok(VerificationReport {
        identity_id: "biangle_selfadjoint".into(),
        params,
        grid: format!("{outer_nodes}^2 outer x {inner_nodes}^4 inner nodes, {n} test functions"),
        max_abs_err: acc.max_abs,
        max_rel_err: acc.max_rel,
        tolerance: tol,
        pass: acc.max_abs <= tol,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        extra: Default::default(),
        notes: vec![],
    })
}

/// For each test function (with its total degree), the largest normalized coefficient of
/// K h on basis elements of total degree above that of h; max_degree bounds the basis.
pub fn biangle_polynomial_preservation(
    alpha: f64,
    beta: f64,
    hs: &[(&(dyn Fn(f64, f64) -> f64 + Sync), usize)],
    pt_y: BianglePoint,
    max_degree: usize,
    nodes: usize,
) -> Result<f64> {
    let op = BiangleOperator::new(alpha, beta, pt_y, nodes)?;
    let outer = outer_rule(alpha, beta, nodes.max(max_degree + 8))?;
    let funcs: Vec<&(dyn Fn(f64, f64) -> f64 + Sync)> = hs.iter().map(|h| h.0).collect();
    let kh = applied(&op, &outer, &funcs);
    let fam = BiangleFamily::new(alpha, beta, max_degree, Normalization::ValueOneAtOne)?;
    let idx = BiangleIndex::up_to(max_degree);
    let mut proj = vec![vec![0.0; idx.len()]; hs.len()];
    let mut norms = vec![0.0; idx.len()];
    for (node, k) in outer.iter().zip(&kh) {
        let v = fam.eval_polar(node.0, node.1);
        for (q, ix) in idx.iter().enumerate() {
            let r = v[ix.n][ix.m];
            norms[q] += node.2 * r * r;
            for (j, row) in proj.iter_mut().enumerate() {
                row[q] += node.2 * k[j] * r;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (j, (_, deg)) in hs.iter().enumerate() {
        for (q, ix) in idx.iter().enumerate() {
            if ix.total_degree() > *deg {
                worst = worst.max((proj[j][q] / norms[q].sqrt()).abs());
            }
        }
    }
    Ok(worst)
}

/// |(K h)(x_k) - h(y1, y2)| along x_k = (1 - d, 1 - d) for each d in `steps`.
pub fn biangle_evaluation_limit(
    alpha: f64,
    beta: f64,
    h: &dyn Fn(f64, f64) -> f64,
    pt_y: BianglePoint,
    steps: &[f64],
    nodes: usize,
) -> Result<Vec<(f64, f64)>> {
    let op = BiangleOperator::new(alpha, beta, pt_y, nodes)?;
    let target = h(pt_y.x1, pt_y.x2);
    steps
        .iter()
        .map(|&d| {
            let p = BianglePoint::new(1.0 - d, 1.0 - d)?;
            Ok((d, (op.apply(h, p)? - target).abs()))
        })
        .collect()
}
