use jacobi_markov::orthopoly::JacobiParams;
use jacobi_markov::quadrature::qmc::{sobol_point, BetaQuantile};
use jacobi_markov::quadrature::{
    convolve_sequences, disk_rule, gauss_jacobi_rule, tensor_rule_capped, ultraspherical_rule, unit_interval_rule,
    MarkovSequenceCoefficients, SphereSampler,
};
use jacobi_markov::special::inc_beta;
use proptest::prelude::*;

/// E[u^j] for u ~ Beta(p, q).
fn beta_moment(p: f64, q: f64, j: usize) -> f64 {
    (0..j).map(|i| (p + i as f64) / (p + q + i as f64)).product()
}

#[test]
fn gauss_jacobi_is_exact_to_degree_2n_minus_1() {
    for &(alpha, beta) in &[(0.0, 0.0), (2.0, 0.5), (-0.5, -0.5), (3.25, 0.75), (-0.6, 1.4)] {
        let n = 10;
        let rule = gauss_jacobi_rule(&JacobiParams::<f64>::new(alpha, beta).unwrap(), n).unwrap();
        for k in 0..2 * n {
            // (1 + x) / 2 ~ Beta(beta + 1, alpha + 1)
            let q: f64 = rule.pairs().map(|(x, w)| w * ((1.0 + x) / 2.0).powi(k as i32)).sum();
            let want = beta_moment(beta + 1.0, alpha + 1.0, k);
            assert!((q - want).abs() < 1e-13, "({alpha},{beta}) k={k}: {q} vs {want}");
        }
    }
}

#[test]
fn unit_interval_and_ultraspherical_rules() {
    let rule = unit_interval_rule(1.5f64, 0.25, 12).unwrap();
    for j in 0..20 {
        let q: f64 = rule.pairs().map(|(u, w)| w * u.powi(j as i32)).sum();
        assert!((q - beta_moment(1.25, 2.5, j)).abs() < 1e-13);
    }
    // weight (1-s^2)^(g-1/2): E[s^2] = 1 / (2 g + 2)
    let g = 0.8;
    let s2: f64 = ultraspherical_rule(g, 8).unwrap().pairs().map(|(s, w)| w * s * s).sum();
    assert!((s2 - 1.0 / (2.0 * g + 2.0)).abs() < 1e-14);
}

#[test]
fn disk_rule_moments() {
    let (alpha, beta) = (2.0f64, 0.5f64);
    let rule = disk_rule(alpha, beta, 16, 16).unwrap();
    assert!((rule.total_mass() - 1.0).abs() < 1e-13);
    let r2 = rule.integrate(|p| p[0] * p[0]);
    assert!((r2 - (beta + 1.0) / (alpha + 1.0)).abs() < 1e-13);
    let c2 = rule.integrate(|p| p[1] * p[1]);
    assert!((c2 - 1.0 / (2.0 * beta + 2.0)).abs() < 1e-13);
}

#[test]
fn tensor_cap_is_enforced() {
    let r = gauss_jacobi_rule(&JacobiParams::new(0.0, 0.0).unwrap(), 100).unwrap();
    assert!(tensor_rule_capped(&[&r, &r, &r], 999_999).is_err());
    assert_eq!(tensor_rule_capped(&[&r, &r], 10_000).unwrap().len(), 10_000);
}

#[test]
fn rule_json_has_documented_fields() {
    let r = gauss_jacobi_rule(&JacobiParams::new(1.0, 0.0).unwrap(), 3).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(v["dimension"], 1);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
    assert_eq!(v["weights"].as_array().unwrap().len(), 3);
}

#[test]
fn sphere_samples_have_unit_norm_and_right_second_moment() {
    let d = 5;
    let s = SphereSampler::new(d, 42).unwrap();
    let pts = s.sample(20_000);
    let mut m2 = 0.0;
    for p in pts.chunks(d) {
        let n: f64 = p.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-12);
        m2 += p[0] * p[0];
    }
    m2 /= 20_000.0;
    // var(x1^2) = 2(d-1)/(d^2(d+2))
    let se = (2.0 * (d as f64 - 1.0) / ((d * d) as f64 * (d as f64 + 2.0)) / 20_000.0).sqrt();
    assert!((m2 - 1.0 / d as f64).abs() < 5.0 * se);
    assert_eq!(s.sample(10), SphereSampler::new(d, 42).unwrap().sample(10));
}

#[test]
fn beta_quantile_inverts_the_cdf() {
    for &(a, b) in &[(0.5, 0.5), (3.5, 2.0), (2.0, 0.5), (1.5, 1.5)] {
        let q = BetaQuantile::new(a, b).unwrap();
        for i in 1..100 {
            let u = i as f64 / 100.0;
            assert!((inc_beta(a, b, q.quantile(u)) - u).abs() < 1e-10, "Beta({a},{b}) u={u}");
        }
    }
    assert!(BetaQuantile::new(0.0, 1.0).is_err());
}

#[test]
fn scrambled_sobol_is_deterministic_and_interior() {
    let (mut a, mut b, mut c) = ([0.0; 7], [0.0; 7], [0.0; 7]);
    sobol_point(17, 3, &mut a);
    sobol_point(17, 3, &mut b);
    sobol_point(17, 4, &mut c);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.iter().all(|x| *x > 0.0 && *x < 1.0));
}

proptest! {
    #[test]
    fn products_of_markov_sequences_are_markov(xs in prop::collection::vec(-1.0f64..1.0, 1..20), ys in prop::collection::vec(-1.0f64..1.0, 20)) {
        let mut a = vec![1.0];
        a.extend(&xs);
        let b: Vec<f64> = std::iter::once(1.0).chain(ys.iter().copied()).take(a.len()).collect();
        let c = convolve_sequences(&MarkovSequenceCoefficients::new(a.clone()).unwrap(), &MarkovSequenceCoefficients::new(b.clone()).unwrap()).unwrap();
        prop_assert_eq!(c.lambdas[0], 1.0);
        for i in 0..a.len() {
            prop_assert!((c.lambdas[i] - a[i] * b[i]).abs() == 0.0);
        }
    }

    #[test]
    fn gauss_weights_positive_and_sum_to_one(alpha in -0.9f64..5.0, beta in -0.9f64..5.0, n in 1usize..40) {
        let rule = gauss_jacobi_rule(&JacobiParams::new(alpha, beta).unwrap(), n).unwrap();
        prop_assert!(rule.weights.iter().all(|w| *w > 0.0));
        prop_assert!((rule.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }
}
