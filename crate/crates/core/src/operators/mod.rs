//! Correlation operators, their matrices in orthonormal bases, and eigenvalue sequences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::symmetric_spectral_norm;
use crate::orthopoly::{JacobiParams, Normalization, PolynomialFamily};
use crate::quadrature::gauss_jacobi_rule;
use crate::{Error, Result};

mod apply;
pub mod ball;

pub use apply::{
    apply_ka, apply_ka0, apply_kal, kernel_ka, kernel_ka_lebesgue, GasperOp, NodeOperator, UltrasphericalOp,
};
pub use ball::{apply_ball_op, BallIntegrator, BallOperator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OperatorSpec {
    UltrasphericalKa { gamma: f64, a: f64 },
    GasperKa0 { alpha: f64, beta: f64, a: f64 },
    GeneralizedKal { alpha: f64, beta: f64, ell: usize, a: f64 },
    BallKa { m: usize, n: usize, a: f64 },
}

/// Jacobi parameters of the radial part of the ball operator for m-blocks of N-particle configurations.
pub fn geometric_params(m: usize, n: usize) -> Result<JacobiParams<f64>> {
    if m < 2 || n < 3 {
        return Err(Error::ParameterDomain(format!("ball operator needs m > 1 and N > 2, got ({m}, {n})")));
    }
    let alpha = (m as f64 * (n as f64 - 2.0) - 2.0) / 2.0;
    let beta = (m as f64 - 2.0) / 2.0;
    JacobiParams::new(alpha, beta)
}

impl OperatorSpec {
    pub fn a(&self) -> f64 {
        match *self {
            OperatorSpec::UltrasphericalKa { a, .. }
            | OperatorSpec::GasperKa0 { a, .. }
            | OperatorSpec::GeneralizedKal { a, .. }
            | OperatorSpec::BallKa { a, .. } => a,
        }
    }

    pub fn ell(&self) -> usize {
        match *self {
            OperatorSpec::GeneralizedKal { ell, .. } => ell,
            _ => 0,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OperatorSpec::UltrasphericalKa { .. } => "UltrasphericalKa",
            OperatorSpec::GasperKa0 { .. } => "GasperKa0",
            OperatorSpec::GeneralizedKal { .. } => "GeneralizedKal",
            OperatorSpec::BallKa { .. } => "BallKa",
        }
    }

    /// Markov kinds fix constants; K_{a,l} with l > 0 does not.
    pub fn is_markov(&self) -> bool {
        self.ell() == 0
    }

    /// (alpha, beta) of the disk measure for the Gasper-type kinds.
    fn gasper_pair(&self) -> Option<(f64, f64)> {
        match *self {
            OperatorSpec::GasperKa0 { alpha, beta, .. } | OperatorSpec::GeneralizedKal { alpha, beta, .. } => {
                Some((alpha, beta))
            }
            OperatorSpec::BallKa { m, n, .. } => geometric_params(m, n).ok().map(|p| (p.alpha, p.beta)),
            OperatorSpec::UltrasphericalKa { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.a();
        if !(a.abs() <= 1.0) {
            return Err(Error::ParameterDomain(format!("need |a| <= 1, got {a}")));
        }
        match *self {
            OperatorSpec::UltrasphericalKa { gamma, .. } => {
                if !(gamma > 0.0) {
                    return Err(Error::ParameterDomain(format!("K_a needs gamma > 0, got {gamma}")));
                }
            }
            OperatorSpec::BallKa { m, n, .. } => {
                geometric_params(m, n)?;
            }
            OperatorSpec::GasperKa0 { alpha, beta, .. } | OperatorSpec::GeneralizedKal { alpha, beta, .. } => {
                JacobiParams::new(alpha, beta)?.require_gasper()?;
            }
        }
        Ok(())
    }

    /// Parameters of the orthonormal basis that diagonalizes the operator.
    pub fn basis_params(&self) -> Result<JacobiParams<f64>> {
        self.validate()?;
        match *self {
            OperatorSpec::UltrasphericalKa { gamma, .. } => JacobiParams::ultraspherical(gamma),
            OperatorSpec::GeneralizedKal { alpha, beta, ell, .. } => JacobiParams::new(alpha, beta + ell as f64),
            _ => {
                let (alpha, beta) = self.gasper_pair().expect("gasper kind");
                JacobiParams::new(alpha, beta)
            }
        }
    }

    pub fn basis(&self, normalization: Normalization) -> Result<PolynomialFamily<f64>> {
        PolynomialFamily::new(self.basis_params()?, normalization)
    }

    /// Quadrature realization with `nodes` points per axis.
    ///
    /// alpha = beta in the l = 0 kinds goes through the ultraspherical operator
    /// with index alpha + 1/2 at the point 2a^2 - 1, which has the same eigenpairs.
    pub fn realize(&self, nodes: usize) -> Result<Box<dyn NodeOperator<f64> + Send + Sync>> {
        self.validate()?;
        match *self {
            OperatorSpec::UltrasphericalKa { gamma, a } => Ok(Box::new(UltrasphericalOp::new(gamma, a, nodes)?)),
            _ => {
                let (alpha, beta) = self.gasper_pair().expect("gasper kind");
                let ell = self.ell();
                let a = self.a();
                if alpha == beta && ell == 0 {
                    return Ok(Box::new(UltrasphericalOp::new(alpha + 0.5, 2.0 * a * a - 1.0, nodes)?));
                }
                Ok(Box::new(GasperOp::new(alpha, beta, ell, a, nodes, nodes)?))
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            OperatorSpec::UltrasphericalKa { gamma, a } => format!("kind=UltrasphericalKa gamma={gamma} a={a}"),
            OperatorSpec::GasperKa0 { alpha, beta, a } => {
                format!("kind=GasperKa0 alpha={alpha} beta={beta} a={a}")
            }
            OperatorSpec::GeneralizedKal { alpha, beta, ell, a } => {
                format!("kind=GeneralizedKal alpha={alpha} beta={beta} ell={ell} a={a}")
            }
            OperatorSpec::BallKa { m, n, a } => format!("kind=BallKa m={m} N={n} a={a}"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub spec: OperatorSpec,
    pub dim: usize,
    pub nodes_per_axis: usize,
    /// Row-major entries <p_i, K p_j>.
    pub entries: Vec<f64>,
    pub basis: JacobiParams<f64>,
    pub warnings: Vec<String>,
}

impl OperatorMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Largest |M_ij| with i > j (degree raising).
    pub fn lower_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max(self.get(i, j).abs());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    worst = worst.max(self.get(i, j).abs());
                }
            }
        }
        worst
    }

    /// max_i |M_i0 - delta_i0|
    pub fn first_column_defect(&self) -> f64 {
        (0..self.dim).map(|i| (self.get(i, 0) - if i == 0 { 1.0 } else { 0.0 }).abs()).fold(0.0, f64::max)
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        let sym: Vec<f64> = (0..self.dim * self.dim)
            .map(|k| {
                let (i, j) = (k / self.dim, k % self.dim);
                0.5 * (self.get(i, j) + self.get(j, i))
            })
            .collect();
        symmetric_spectral_norm(&sym, self.dim)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# {} dim={} nodes={}\n", self.spec.describe(), self.dim, self.nodes_per_axis);
        s.push_str("row");
        for j in 0..self.dim {
            s.push_str(&format!(",c{j}"));
        }
        s.push('\n');
        for i in 0..self.dim {
            s.push_str(&i.to_string());
            for j in 0..self.dim {
                s.push(',');
                s.push_str(&crate::report::fmt_f64(self.get(i, j)));
            }
            s.push('\n');
        }
        s
    }
}

pub fn default_matrix_nodes(dim: usize) -> usize {
    2 * dim + 16
}

/// M_ij = <p_i, K p_j> in the orthonormal basis of the operator's invariant measure.
pub fn operator_matrix(spec: &OperatorSpec, dim: usize) -> Result<OperatorMatrix> {
    operator_matrix_with_nodes(spec, dim, default_matrix_nodes(dim))
}

pub fn operator_matrix_with_nodes(spec: &OperatorSpec, dim: usize, nodes: usize) -> Result<OperatorMatrix> {
    if dim == 0 {
        return Err(Error::InvalidInput("operator matrix needs dim >= 1".into()));
    }
    let basis = spec.basis_params()?;
    let family = PolynomialFamily::new(basis, Normalization::Orthonormal)?;
    let op = spec.realize(nodes)?;
    let outer = gauss_jacobi_rule(&basis, nodes)?;
    let mut warnings = vec![];
    if nodes < dim + spec.ell() + 1 {
        warnings.push(format!(
            "quadrature with {nodes} nodes per axis may not be exact for dim {dim}; use at least {}",
            default_matrix_nodes(dim)
        ));
    }
    let partial: Vec<Result<Vec<f64>>> = (0..outer.len())
        .into_par_iter()
        .map(|k| {
            let t = outer.nodes[k];
            let mut kp = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            op.visit_nodes(t, &mut |x, w| {
                family.fill(x, &mut buf);
                for j in 0..dim {
                    kp[j] += w * buf[j];
                }
            })?;
            family.fill(t, &mut buf);
            let wk = outer.weights[k];
            let mut contrib = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    contrib[i * dim + j] = wk * buf[i] * kp[j];
                }
            }
            Ok(contrib)
        })
        .collect();
    let mut entries = vec![0.0; dim * dim];
    for c in partial {
        for (e, v) in entries.iter_mut().zip(c?) {
            *e += v;
        }
    }
    Ok(OperatorMatrix { spec: *spec, dim, nodes_per_axis: nodes, entries, basis, warnings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceSource {
    Formula,
    Matrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovSequence {
    pub lambdas: Vec<f64>,
    pub source: SequenceSource,
    pub label: String,
}

pub const MARKOV_LABEL: &str = "Markov sequence";
pub const NON_MARKOV_LABEL: &str = "eigenvalue sequence (non-Markov operator)";

/// Closed-form eigenvalue of degree n.
pub fn eigenvalue(spec: &OperatorSpec, family: &PolynomialFamily<f64>, n: usize) -> Result<f64> {
    let a = spec.a();
    match spec {
        OperatorSpec::UltrasphericalKa { .. } => family.ratio_at_one(n, a),
        _ => Ok(a.powi(spec.ell() as i32) * family.ratio_at_one(n, 2.0 * a * a - 1.0)?),
    }
}

pub fn markov_sequence(spec: &OperatorSpec, nmax: usize, source: SequenceSource) -> Result<MarkovSequence> {
    let lambdas = match source {
        SequenceSource::Formula => {
            let fam = spec.basis(Normalization::ValueOneAtOne)?;
            (0..=nmax).map(|n| eigenvalue(spec, &fam, n)).collect::<Result<Vec<_>>>()?
        }
        SequenceSource::Matrix => operator_matrix(spec, nmax + 1)?.diagonal(),
    };
    let label = if spec.is_markov() { MARKOV_LABEL } else { NON_MARKOV_LABEL };
    Ok(MarkovSequence { lambdas, source, label: label.to_string() })
}

/// |K_{a,0} h(t) - h(2a^2 - 1)| along the given t values.
pub fn evaluation_limit_errors(
    alpha: f64,
    beta: f64,
    a: f64,
    h: &dyn Fn(f64) -> f64,
    ts: &[f64],
    nodes: usize,
) -> Result<Vec<f64>> {
    let op = OperatorSpec::GasperKa0 { alpha, beta, a }.realize(nodes)?;
    let target = h(2.0 * a * a - 1.0);
    ts.iter().map(|&t| Ok((op.apply(h, t)? - target).abs())).collect()
}
