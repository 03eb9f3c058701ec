//! Jacobi and ultraspherical polynomial families.

use serde::{Deserialize, Serialize};

use crate::special;
use crate::{Error, Real, Result};

pub const DEFAULT_MAX_DEGREE: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams<T> {
    pub alpha: T,
    pub beta: T,
    pub gasper_regime: bool,
}

impl<T: Real> JacobiParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        let neg_one = -T::one();
        if !(alpha > neg_one) || !(beta > neg_one) {
            return Err(Error::ParameterDomain(format!(
                "jacobi parameters need alpha > -1 and beta > -1, got ({alpha}, {beta})"
            )));
        }
        let half = T::lit(0.5);
        let gasper_regime = (alpha >= beta && beta > -half) || (alpha > beta && beta == -half);
        Ok(Self { alpha, beta, gasper_regime })
    }

    /// Parameters of the ultraspherical family of index gamma, alpha = beta = gamma - 1/2.
    pub fn ultraspherical(gamma: T) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::ParameterDomain(format!(
                "ultraspherical index must be positive, got {gamma}"
            )));
        }
        Self::new(gamma - T::lit(0.5), gamma - T::lit(0.5))
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha == self.beta
    }

    pub fn require_gasper(&self) -> Result<()> {
        if self.gasper_regime {
            Ok(())
        } else {
            Err(Error::Regime(format!(
                "need alpha >= beta > -1/2 (or alpha > beta = -1/2), got ({}, {})",
                self.alpha, self.beta
            )))
        }
    }

    /// Monic recurrence coefficients (a_n, b_n) of p_{n+1} = (x - a_n) p_n - b_n p_{n-1}, with b_0 = 1.
    pub fn monic_coeffs(&self, n: usize) -> (T, T) {
        let (al, be) = (self.alpha, self.beta);
        let one = T::one();
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let nn = T::from_index(n);
        let s = al + be;
        let a = if n == 0 {
            (be - al) / (s + two)
        } else {
            let m = two * nn + s;
            (be * be - al * al) / (m * (m + two))
        };
        let b = match n {
            0 => one,
            1 => four * (one + al) * (one + be) / ((two + s) * (two + s) * (T::lit(3.0) + s)),
            _ => {
                let m = two * nn + s;
                four * nn * (nn + al) * (nn + be) * (nn + s) / (m * m * (m + one) * (m - one))
            }
        };
        (a, b)
    }

    /// Ratio m_n(1) / m_{n-1}(1) of consecutive monic values at 1.
    fn monic_growth_at_one(&self, n: usize) -> T {
        let (al, be) = (self.alpha, self.beta);
        let two = T::lit(2.0);
        let s = al + be;
        if n == 1 {
            return two * (al + T::one()) / (s + two);
        }
        let nn = T::from_index(n);
        let m = two * nn + s;
        two * (nn + al) * (nn + s) / ((m - T::one()) * m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Orthonormal,
    ValueOneAtOne,
    Monic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreePolicy {
    Error,
    Extend,
}

/// Cached three-term recurrence data up to `max_degree`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecurrenceTable<T> {
    pub max_degree: usize,
    /// a_n for n in 0..=max_degree
    pub shift: Vec<T>,
    /// b_n for n in 0..=max_degree (b_0 = 1)
    pub coupling: Vec<T>,
    sqrt_coupling: Vec<T>,
    growth_at_one: Vec<T>,
}

pub fn recurrence_coeffs<T: Real>(params: &JacobiParams<T>, max_degree: usize) -> Result<RecurrenceTable<T>> {
    JacobiParams::new(params.alpha, params.beta)?;
    let len = max_degree + 1;
    let mut shift = Vec::with_capacity(len);
    let mut coupling = Vec::with_capacity(len);
    let mut growth = Vec::with_capacity(len);
    for n in 0..len {
        let (a, b) = params.monic_coeffs(n);
        shift.push(a);
        coupling.push(b);
        growth.push(if n == 0 { T::one() } else { params.monic_growth_at_one(n) });
    }
    let sqrt_coupling = coupling.iter().map(|b| b.sqrt()).collect();
    Ok(RecurrenceTable { max_degree, shift, coupling, sqrt_coupling, growth_at_one: growth })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialFamily<T> {
    pub params: JacobiParams<T>,
    pub normalization: Normalization,
    pub policy: DegreePolicy,
    pub recurrence: RecurrenceTable<T>,
}

impl<T: Real> PolynomialFamily<T> {
    pub fn new(params: JacobiParams<T>, normalization: Normalization) -> Result<Self> {
        Self::with_max_degree(params, normalization, DEFAULT_MAX_DEGREE)
    }

    pub fn with_max_degree(params: JacobiParams<T>, normalization: Normalization, max_degree: usize) -> Result<Self> {
        let recurrence = recurrence_coeffs(&params, max_degree)?;
        Ok(Self { params, normalization, policy: DegreePolicy::Extend, recurrence })
    }

    pub fn jacobi(alpha: T, beta: T, normalization: Normalization) -> Result<Self> {
        Self::new(JacobiParams::new(alpha, beta)?, normalization)
    }

    pub fn ultraspherical(gamma: T, normalization: Normalization) -> Result<Self> {
        Self::new(JacobiParams::ultraspherical(gamma)?, normalization)
    }

    pub fn with_policy(mut self, policy: DegreePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn max_degree(&self) -> usize {
        self.recurrence.max_degree
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.recurrence.max_degree && self.policy == DegreePolicy::Error {
            return Err(Error::DegreeOutOfRange { requested: n, max: self.recurrence.max_degree });
        }
        Ok(())
    }

    fn table_for(&self, n: usize) -> std::borrow::Cow<'_, RecurrenceTable<T>> {
        if n <= self.recurrence.max_degree {
            std::borrow::Cow::Borrowed(&self.recurrence)
        } else {
            let grown = recurrence_coeffs(&self.params, n.max(2 * self.recurrence.max_degree))
                .expect("parameters validated at construction");
            std::borrow::Cow::Owned(grown)
        }
    }

    pub fn eval(&self, n: usize, x: T) -> Result<T> {
        self.check_degree(n)?;
        let mut out = vec![T::zero(); n + 1];
        self.fill(x, &mut out);
        Ok(out[n])
    }

    /// Values of degrees 0..=nmax at x.
    pub fn eval_upto(&self, nmax: usize, x: T) -> Result<Vec<T>> {
        self.check_degree(nmax)?;
        let mut out = vec![T::zero(); nmax + 1];
        self.fill(x, &mut out);
        Ok(out)
    }

    /// Writes degrees 0..out.len() at x into `out`.
    pub fn fill(&self, x: T, out: &mut [T]) {
        if out.is_empty() {
            return;
        }
        let tab = self.table_for(out.len() - 1);
        fill_with(&tab, self.normalization, x, out);
    }

    /// p_n(x) / p_n(1), independent of the normalization mode.
    pub fn ratio_at_one(&self, n: usize, x: T) -> Result<T> {
        self.check_degree(n)?;
        let mut out = vec![T::zero(); n + 1];
        let tab = self.table_for(n);
        fill_with(&tab, Normalization::ValueOneAtOne, x, &mut out);
        Ok(out[n])
    }

    /// Value of the degree-n member at 1 in this family's normalization.
    pub fn value_at_one(&self, n: usize) -> Result<T> {
        self.eval(n, T::one())
    }

    /// Same parameters, another normalization.
    pub fn renormalized(&self, normalization: Normalization) -> Self {
        Self { normalization, ..self.clone() }
    }
}

fn fill_with<T: Real>(tab: &RecurrenceTable<T>, norm: Normalization, x: T, out: &mut [T]) {
    let len = out.len();
    out[0] = T::one();
    if len == 1 {
        return;
    }
    match norm {
        Normalization::Monic => {
            out[1] = x - tab.shift[0];
            for k in 1..len - 1 {
                out[k + 1] = (x - tab.shift[k]) * out[k] - tab.coupling[k] * out[k - 1];
            }
        }
        Normalization::Orthonormal => {
            out[1] = (x - tab.shift[0]) / tab.sqrt_coupling[1];
            for k in 1..len - 1 {
                out[k + 1] =
                    ((x - tab.shift[k]) * out[k] - tab.sqrt_coupling[k] * out[k - 1]) / tab.sqrt_coupling[k + 1];
            }
        }
        Normalization::ValueOneAtOne => {
            if x == T::one() {
                out.iter_mut().for_each(|v| *v = T::one());
                return;
            }
            let g = &tab.growth_at_one;
            out[1] = (x - tab.shift[0]) / g[1];
            for k in 1..len - 1 {
                out[k + 1] = ((x - tab.shift[k]) * out[k] - tab.coupling[k] / g[k] * out[k - 1]) / g[k + 1];
            }
        }
    }
}

/// Normalizing constants of the ultraspherical and Jacobi probability measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    pub c_gamma: f64,
    pub c_alpha_beta: f64,
}

impl NormalizationConstants {
    /// c_gamma for the given ultraspherical index and c_{alpha,beta} for the given pair.
    pub fn new(gamma: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(gamma > -0.5) {
            return Err(Error::ParameterDomain(format!("c_gamma needs gamma > -1/2, got {gamma}")));
        }
        JacobiParams::new(alpha, beta)?;
        Ok(Self { c_gamma: special::c_gamma(gamma), c_alpha_beta: special::c_alpha_beta(alpha, beta) })
    }
}

/// Ultraspherical p_n^{(gamma)}(x) in the requested normalization.
pub fn ultraspherical<T: Real>(gamma: T, n: usize, x: T, normalization: Normalization) -> Result<T> {
    let fam = PolynomialFamily::with_max_degree(JacobiParams::ultraspherical(gamma)?, normalization, n.max(1))?;
    fam.eval(n, x)
}

/// Ultraspherical values normalized at one for index gamma > -1/2 (zonal factors need gamma <= 0 too).
pub fn zonal_upto<T: Real>(gamma: T, nmax: usize, x: T) -> Result<Vec<T>> {
    let h = T::lit(0.5);
    let fam = PolynomialFamily::with_max_degree(
        JacobiParams::new(gamma - h, gamma - h)?,
        Normalization::ValueOneAtOne,
        nmax.max(1),
    )?;
    fam.eval_upto(nmax, x)
}
