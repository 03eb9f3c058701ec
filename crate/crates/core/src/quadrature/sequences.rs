use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Eigenvalue sequence of a Markov operator: lambda_0 = 1, |lambda_n| <= 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovSequenceCoefficients {
    pub lambdas: Vec<f64>,
}

impl MarkovSequenceCoefficients {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        const TOL: f64 = 1e-12;
        match lambdas.first() {
            Some(l0) if (l0 - 1.0).abs() <= TOL => {}
            _ => return Err(Error::InvalidInput("a Markov sequence starts with lambda_0 = 1".into())),
        }
        if let Some((n, l)) = lambdas.iter().enumerate().find(|(_, l)| l.abs() > 1.0 + TOL) {
            return Err(Error::InvalidInput(format!("|lambda_{n}| = {} exceeds 1", l.abs())));
        }
        Ok(Self { lambdas })
    }
}

/// Componentwise product; the eigenvalues of the composed operator.
pub fn convolve_sequences(
    a: &MarkovSequenceCoefficients,
    b: &MarkovSequenceCoefficients,
) -> Result<MarkovSequenceCoefficients> {
    if a.lambdas.len() != b.lambdas.len() {
        return Err(Error::InvalidInput(format!(
            "sequence lengths differ: {} vs {}",
            a.lambdas.len(),
            b.lambdas.len()
        )));
    }
    MarkovSequenceCoefficients::new(a.lambdas.iter().zip(&b.lambdas).map(|(x, y)| x * y).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_mismatch() {
        let one = MarkovSequenceCoefficients::new(vec![1.0; 4]).unwrap();
        let s = MarkovSequenceCoefficients::new(vec![1.0, 0.5, -0.25, 0.1]).unwrap();
        assert_eq!(convolve_sequences(&s, &one).unwrap(), s);
        let short = MarkovSequenceCoefficients::new(vec![1.0, 0.2]).unwrap();
        assert!(convolve_sequences(&s, &short).is_err());
        assert!(MarkovSequenceCoefficients::new(vec![0.9]).is_err());
        assert!(MarkovSequenceCoefficients::new(vec![1.0, 1.5]).is_err());
    }
}
