use jacobi_markov::operators::{
    apply_ball_op, apply_ka, apply_ka0, apply_kal, geometric_params, kernel_ka, kernel_ka_lebesgue, markov_sequence,
    operator_matrix, BallIntegrator, BallOperator, GasperOp, OperatorSpec, SequenceSource,
};
use jacobi_markov::special::c_gamma;
use jacobi_markov::{Error, PolynomialFamily};
use jacobi_markov::orthopoly::Normalization;
use proptest::prelude::*;

fn specs() -> Vec<OperatorSpec> {
    vec![
        OperatorSpec::UltrasphericalKa { gamma: 1.5, a: 0.4 },
        OperatorSpec::GasperKa0 { alpha: 2.0, beta: 0.5, a: 0.3 },
        OperatorSpec::GeneralizedKal { alpha: 2.0, beta: 0.5, ell: 2, a: -0.6 },
        OperatorSpec::BallKa { m: 3, n: 4, a: 0.5 },
    ]
}

#[test]
fn matrices_are_diagonal_with_formula_eigenvalues() {
    for spec in specs() {
        let m = operator_matrix(&spec, 12).unwrap();
        let formula = markov_sequence(&spec, 11, SequenceSource::Formula).unwrap().lambdas;
        assert!(m.symmetry_defect() < 1e-9, "{spec:?}");
        assert!(m.max_off_diagonal() < 1e-8, "{spec:?}");
        for (d, l) in m.diagonal().iter().zip(&formula) {
            assert!((d - l).abs() < 1e-8, "{spec:?}: {d} vs {l}");
        }
        if spec.is_markov() {
            assert!(m.first_column_defect() < 1e-10);
            assert!((formula[0] - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn markov_operators_fix_constants() {
    let one = |_: f64| 1.0;
    for &t in &[-0.9, 0.0, 0.7] {
        assert!((apply_ka(1.2, 0.3, &one, t).unwrap() - 1.0).abs() < 1e-13);
        assert!((apply_ka0(2.0, 0.5, -0.4, &one, t).unwrap() - 1.0).abs() < 1e-13);
    }
    // K_{a,l} 1 = a^l is not one for l > 0
    let v = apply_kal(2.0, 0.5, 2, 0.6, &one, 0.1).unwrap();
    assert!((v - 1.0).abs() > 1e-3);
}

#[test]
fn ultraspherical_operator_against_midpoint_oracle() {
    // K_a h(t) = int h(a t + s b sqrt(1-t^2)) c (1-s^2)^(gamma-1) ds, with s = cos(theta)
    let (gamma, a, t) = (1.5f64, 0.35f64, -0.2f64);
    let h = |x: f64| (2.0 * x).sin() + x * x;
    let b = (1.0 - a * a).sqrt();
    let steps = 200_000;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..steps {
        let th = std::f64::consts::PI * (i as f64 + 0.5) / steps as f64;
        let s = th.cos();
        let w = th.sin().powf(2.0 * gamma - 1.0);
        num += w * h(a * t + s * b * (1.0 - t * t).sqrt());
        den += w;
    }
    assert!((apply_ka(gamma, a, &h, t).unwrap() - num / den).abs() < 1e-9);
}

#[test]
fn kernel_integrates_to_the_invariant_density() {
    let (gamma, a, t) = (1.5f64, 0.3f64, 0.4f64);
    let steps = 200_000;
    let lebesgue: f64 = (0..steps)
        .map(|i| kernel_ka_lebesgue(gamma, a, t, -1.0 + 2.0 * (i as f64 + 0.5) / steps as f64).unwrap())
        .sum::<f64>()
        * 2.0
        / steps as f64;
    let density = c_gamma(gamma) * (1.0 - t * t).powf(gamma - 0.5);
    assert!((lebesgue - density).abs() < 1e-6);
    assert!((kernel_ka(gamma, a, t, 0.2).unwrap() - kernel_ka(gamma, a, 0.2, t).unwrap()).abs() < 1e-12);
    assert!(matches!(kernel_ka(gamma, 1.0, t, 0.2), Err(Error::Singular(_))));
}

#[test]
fn geometric_parameter_map() {
    let p = geometric_params(3, 4).unwrap();
    assert_eq!((p.alpha, p.beta), (2.0, 0.5));
    let p = geometric_params(2, 3).unwrap();
    assert_eq!((p.alpha, p.beta), (0.0, 0.0));
    assert!(geometric_params(1, 4).is_err());
}

#[test]
fn regime_and_domain_errors() {
    assert!(matches!(GasperOp::new(0.4, 0.5, 0, 0.3, 8, 8), Err(Error::Regime(_))));
    assert!(apply_ka(1.0, 1.5, &|x| x, 0.0).is_err());
    assert!(apply_ka(1.0, 0.5, &|x| x, 1.5).is_err());
    assert!(apply_kal(2.0, 0.5, 1, 0.3, &|x| x, -1.0).is_err());
}

#[test]
fn ball_operator_sampling_matches_radial_reduction() {
    let op = BallOperator::new(3, 4, 0.5).unwrap();
    let f = |v: &[f64]| {
        let r2: f64 = v.iter().map(|x| x * x).sum();
        1.0 + r2 - 2.0 * r2 * r2
    };
    let v = [0.3, -0.2, 0.4];
    let exact = apply_ball_op(&op, &f, &v, BallIntegrator::RadialReduction).unwrap().mean;
    let mc = apply_ball_op(&op, &f, &v, BallIntegrator::MonteCarlo { samples: 200_000, seed: 5 }).unwrap();
    assert!((mc.mean - exact).abs() < 5.0 * mc.std_error, "{} vs {exact} (se {})", mc.mean, mc.std_error);
    assert!(op.apply_radial(&|v: &[f64]| v[0], &v).is_err());
}

proptest! {
    #[test]
    fn markov_eigenvalues_bounded_by_one(alpha in 0.0f64..4.0, d in 0.05f64..2.0, a in -0.99f64..0.99) {
        let beta = (alpha - d).max(-0.45);
        prop_assume!(alpha > beta);
        let spec = OperatorSpec::GasperKa0 { alpha, beta, a };
        let seq = markov_sequence(&spec, 40, SequenceSource::Formula).unwrap();
        prop_assert!((seq.lambdas[0] - 1.0).abs() < 1e-14);
        prop_assert!(seq.lambdas.iter().all(|l| l.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn eigenfunction_relation_holds(gamma in 0.3f64..3.0, a in -0.95f64..0.95, t in -0.99f64..0.99, n in 0usize..12) {
        let fam = PolynomialFamily::ultraspherical(gamma, Normalization::ValueOneAtOne).unwrap();
        let h = |x: f64| fam.eval(n, x).unwrap();
        let lhs = apply_ka(gamma, a, &h, t).unwrap();
        let rhs = fam.eval(n, a).unwrap() * fam.eval(n, t).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}
