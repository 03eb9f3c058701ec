//! Jacobi and ultraspherical Markov operators.
//!
//! Polynomial families, quadrature for the associated probability measures,
//! the correlation operators built from product formulas, identity checks,
//! eigenvalue bounds and the biangle/triangle extensions.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod orthopoly;
pub mod quadrature;
pub mod report;
pub mod simplex;
pub mod special;
pub mod verify;

pub use error::{Error, Result};

/// Scalar type used by the polynomial, quadrature and operator layers.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    fn from_index(n: usize) -> Self {
        Self::from_usize(n).expect("index fits the scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type JacobiParams = orthopoly::JacobiParams<f64>;
pub type PolynomialFamily = orthopoly::PolynomialFamily<f64>;
pub type QuadratureRule = quadrature::QuadratureRule<f64>;

pub type JacobiParamsF32 = orthopoly::JacobiParams<f32>;
pub type PolynomialFamilyF32 = orthopoly::PolynomialFamily<f32>;
pub type QuadratureRuleF32 = quadrature::QuadratureRule<f32>;
