//! Gamma-function constants for the probability measures.

use statrs::function::beta::beta_reg;

pub use statrs::function::gamma::{gamma, ln_gamma};

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

pub fn beta_fn(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// Regularized incomplete beta I_x(a, b).
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        beta_reg(a, b, x)
    }
}

/// Normalizer of (1 - t^2)^(gamma - 1/2) dt on [-1, 1].
pub fn c_gamma(gamma: f64) -> f64 {
    (ln_gamma(gamma + 1.0) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(gamma + 0.5)).exp()
}

/// Normalizer of (1 - x)^alpha (1 + x)^beta dx on [-1, 1].
pub fn c_alpha_beta(alpha: f64, beta: f64) -> f64 {
    (-(alpha + beta + 1.0) * std::f64::consts::LN_2 - ln_beta(alpha + 1.0, beta + 1.0)).exp()
}

/// Normalizer of (1 - r^2)^(alpha - beta - 1) r^(2 beta + 1) sin^(2 beta) theta dr dtheta.
pub fn disk_constant(alpha: f64, beta: f64) -> f64 {
    (std::f64::consts::LN_2 + ln_gamma(alpha + 1.0)
        - 0.5 * std::f64::consts::PI.ln()
        - ln_gamma(beta + 0.5)
        - ln_gamma(alpha - beta))
    .exp()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_and_chebyshev_constants() {
        assert!((c_gamma(0.5) - 0.5).abs() < 1e-14);
        assert!((c_gamma(0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-14);
        assert!((c_gamma(1.0) - 2.0 / std::f64::consts::PI).abs() < 1e-14);
        assert!((c_alpha_beta(0.0, 0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(2, 3), 0.0);
    }
}
