use jacobi_markov::orthopoly::{zonal_upto, DegreePolicy, Normalization};
use jacobi_markov::{JacobiParams, PolynomialFamily, PolynomialFamilyF32};
use proptest::prelude::*;

/// Generalized binomial coefficient C(z, j).
fn binom(z: f64, j: usize) -> f64 {
    (1..=j).map(|i| (z - j as f64 + i as f64) / i as f64).product()
}

/// Explicit sum for P_n^{(alpha,beta)}(x) divided by its value at one.
fn jacobi_explicit(alpha: f64, beta: f64, n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let s: f64 = (0..=n)
        .map(|k| {
            binom(nf + alpha, n - k) * binom(nf + beta, k) * ((x - 1.0) / 2.0).powi(k as i32) * ((x + 1.0) / 2.0).powi((n - k) as i32)
        })
        .sum();
    s / binom(nf + alpha, n)
}

/// Gram matrix of the family under the Jacobi probability measure, by a fine midpoint rule in theta.
fn gram(alpha: f64, beta: f64, dim: usize, fam: &PolynomialFamily) -> Vec<Vec<f64>> {
    let steps = 40_000;
    let mut g = vec![vec![0.0; dim]; dim];
    let mut mass = 0.0;
    for i in 0..steps {
        let th = std::f64::consts::PI * (i as f64 + 0.5) / steps as f64;
        let x = th.cos();
        let w = (1.0 - x).powf(alpha) * (1.0 + x).powf(beta) * th.sin();
        mass += w;
        let v = fam.eval_upto(dim - 1, x).unwrap();
        for r in 0..dim {
            for c in 0..dim {
                g[r][c] += w * v[r] * v[c];
            }
        }
    }
    g.iter_mut().for_each(|row| row.iter_mut().for_each(|x| *x /= mass));
    g
}

#[test]
fn recurrence_matches_explicit_sum() {
    for &(alpha, beta) in &[(0.0, 0.0), (2.0, 0.5), (-0.5, -0.5), (3.25, 0.75), (0.3, -0.7)] {
        let fam = PolynomialFamily::jacobi(alpha, beta, Normalization::ValueOneAtOne).unwrap();
        for n in 0..=15 {
            for i in 0..=20 {
                let x = -1.0 + 0.1 * i as f64;
                let want = jacobi_explicit(alpha, beta, n, x);
                let got = fam.eval(n, x).unwrap();
                assert!((got - want).abs() <= 1e-11 * (1.0 + want.abs()), "({alpha},{beta}) n={n} x={x}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn orthonormal_family_has_identity_gram() {
    for &(alpha, beta) in &[(0.0, 0.0), (2.0, 0.5), (1.5, 1.5)] {
        let fam = PolynomialFamily::jacobi(alpha, beta, Normalization::Orthonormal).unwrap();
        let g = gram(alpha, beta, 8, &fam);
        for (r, row) in g.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-6, "({alpha},{beta}) [{r},{c}] = {v}");
            }
        }
    }
}

#[test]
fn classical_special_cases() {
    // gamma = 1: U_n(cos t) / (n + 1)
    let fam = PolynomialFamily::ultraspherical(1.0, Normalization::ValueOneAtOne).unwrap();
    for n in 0..12 {
        for &t in &[0.3f64, 1.1, 2.7] {
            let want = ((n + 1) as f64 * t).sin() / ((n + 1) as f64 * t.sin());
            assert!((fam.eval(n, t.cos()).unwrap() - want).abs() < 1e-13);
        }
    }
    // Legendre
    let leg = PolynomialFamily::ultraspherical(0.5, Normalization::ValueOneAtOne).unwrap();
    assert!((leg.eval(2, 0.4).unwrap() - (3.0 * 0.16 - 1.0) / 2.0).abs() < 1e-15);
    // index 0 of the zonal family is Chebyshev T
    let z = zonal_upto(0.0, 9, 0.6f64.cos()).unwrap();
    for (n, v) in z.iter().enumerate() {
        assert!((v - (n as f64 * 0.6).cos()).abs() < 1e-13);
    }
}

#[test]
fn ultraspherical_is_symmetric_jacobi() {
    let u = PolynomialFamily::ultraspherical(1.7, Normalization::Orthonormal).unwrap();
    let j = PolynomialFamily::jacobi(1.2, 1.2, Normalization::Orthonormal).unwrap();
    for n in 0..20 {
        assert!((u.eval(n, 0.37).unwrap() - j.eval(n, 0.37).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn invalid_parameters_and_degrees() {
    assert!(JacobiParams::new(-1.5, 0.0).is_err());
    assert!(JacobiParams::new(0.0, -1.0).is_err());
    let fam = PolynomialFamily::with_max_degree(JacobiParams::new(1.0, 0.5).unwrap(), Normalization::Orthonormal, 10).unwrap();
    assert!(fam.clone().with_policy(DegreePolicy::Error).eval(11, 0.2).is_err());
    let ext = fam.clone();
    let big = PolynomialFamily::jacobi(1.0, 0.5, Normalization::Orthonormal).unwrap();
    assert!((ext.eval(40, 0.2).unwrap() - big.eval(40, 0.2).unwrap()).abs() < 1e-12);
}

#[test]
fn single_precision_alias_tracks_double() {
    let f = PolynomialFamilyF32::jacobi(2.0, 0.5, Normalization::ValueOneAtOne).unwrap();
    let d = PolynomialFamily::jacobi(2.0, 0.5, Normalization::ValueOneAtOne).unwrap();
    for n in 0..10 {
        assert!((f.eval(n, 0.3f32).unwrap() as f64 - d.eval(n, 0.3).unwrap()).abs() < 1e-5);
    }
}

proptest! {
    #[test]
    fn normalized_ultraspherical_bounded_by_one(gamma in 0.05f64..3.0, n in 0usize..40, x in -1.0f64..1.0) {
        let fam = PolynomialFamily::ultraspherical(gamma, Normalization::ValueOneAtOne).unwrap();
        prop_assert!(fam.eval(n, x).unwrap().abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn reflection_swaps_parameters(alpha in -0.9f64..4.0, beta in -0.9f64..4.0, n in 0usize..25, x in -1.0f64..1.0) {
        let p = PolynomialFamily::jacobi(alpha, beta, Normalization::Orthonormal).unwrap();
        let q = PolynomialFamily::jacobi(beta, alpha, Normalization::Orthonormal).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = (p.eval(n, -x).unwrap(), sign * q.eval(n, x).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn ratio_at_one_is_one_at_one(alpha in -0.9f64..4.0, beta in -0.9f64..4.0, n in 0usize..30) {
        let p = PolynomialFamily::jacobi(alpha, beta, Normalization::Orthonormal).unwrap();
        prop_assert!((p.ratio_at_one(n, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
