use jacobi_markov::orthopoly::Normalization;
use jacobi_markov::quadrature::{ultraspherical_rule, unit_interval_rule};
use jacobi_markov::simplex::{
    biangle_evaluation_limit, biangle_operator_selfadjoint, biangle_polynomial_preservation, helper_c, helper_d, helper_e,
    triangle_poly, verify_biangle_product, verify_triangle_product, BiangleFamily, BiangleIndex, BianglePoint,
    TriangleFamily, TriangleIndex, TriangleIntegrator, TrianglePoint,
};
use jacobi_markov::Error;
use proptest::prelude::*;

#[test]
fn biangle_polynomials_are_orthogonal() {
    // weight (1-x1)^alpha (x1 - x2^2)^(beta-1/2); with x1 = u, x2 = sqrt(u) s it factors
    let (alpha, beta) = (2.0f64, 0.75f64);
    let fam = BiangleFamily::new(alpha, beta, 5, Normalization::Orthonormal).unwrap();
    let idx = BiangleIndex::up_to(5);
    let u = unit_interval_rule(alpha, beta, 20).unwrap();
    let s = ultraspherical_rule(beta, 20).unwrap();
    let mut gram = vec![vec![0.0; idx.len()]; idx.len()];
    for (uu, wu) in u.pairs() {
        for (ss, ws) in s.pairs() {
            let p = BianglePoint::new(uu, uu.sqrt() * ss).unwrap();
            let v: Vec<f64> = idx.iter().map(|i| fam.eval(*i, p).unwrap()).collect();
            for i in 0..v.len() {
                for j in 0..v.len() {
                    gram[i][j] += wu * ws * v[i] * v[j];
                }
            }
        }
    }
    // the factors are orthonormal, the products only orthogonal
    for i in 0..idx.len() {
        for j in 0..idx.len() {
            if i != j {
                assert!(gram[i][j].abs() < 1e-12, "{:?} {:?}: {}", idx[i], idx[j], gram[i][j]);
            }
        }
        assert!(gram[i][i] > 0.0);
    }
}

#[test]
fn triangle_polynomials_are_orthogonal() {
    // weight (1-x1)^alpha (x1-x2)^beta x2^gamma; with x2 = x1 v it factors
    let (alpha, beta, gamma) = (4.0f64, 1.0f64, 0.5f64);
    let fam = TriangleFamily::new(alpha, beta, gamma, 4).unwrap();
    let idx = TriangleIndex::up_to(4);
    let outer = unit_interval_rule(alpha, beta + gamma + 1.0, 16).unwrap();
    let inner = unit_interval_rule(beta, gamma, 16).unwrap();
    let mut gram = vec![vec![0.0; idx.len()]; idx.len()];
    for (x1, w1) in outer.pairs() {
        for (v, w2) in inner.pairs() {
            let p = TrianglePoint::new(x1, x1 * v).unwrap();
            let vals: Vec<f64> = idx.iter().map(|i| fam.eval(*i, p).unwrap()).collect();
            for i in 0..vals.len() {
                for j in 0..vals.len() {
                    gram[i][j] += w1 * w2 * vals[i] * vals[j];
                }
            }
        }
    }
    for i in 0..idx.len() {
        for j in 0..idx.len() {
            if i != j {
                assert!(gram[i][j].abs() < 1e-12, "{:?} {:?}: {}", idx[i], idx[j], gram[i][j]);
            }
        }
        assert!(gram[i][i] > 0.0);
    }
}

#[test]
fn triangle_values_at_the_corner_and_edge() {
    // value-normalized factors give R = 1 at (1, 1)
    for i in TriangleIndex::up_to(4) {
        assert!((triangle_poly(4.0, 1.0, 0.5, i, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-13);
    }
    // continuous extension at x1 = 0
    let i = TriangleIndex::new(3, 1).unwrap();
    let near = triangle_poly(4.0, 1.0, 0.5, i, 1e-9, 5e-10).unwrap();
    assert!((triangle_poly(4.0, 1.0, 0.5, i, 0.0, 0.0).unwrap() - near).abs() < 1e-7);
    assert!(TriangleIndex::new(2, 3).is_err());
    assert!(TrianglePoint::new(0.3, 0.5).is_err());
    assert!(BianglePoint::new(0.25, 0.6).is_err());
}

#[test]
fn biangle_product_formula() {
    let pairs = [((0.7, 0.3), (0.5, -0.2)), ((0.9, 0.85), (0.3, 0.1)), ((0.2, -0.15), (0.95, 0.4))];
    let r = verify_biangle_product(2.0, 0.75, 6, &pairs, 16, 1e-6).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(matches!(verify_biangle_product(2.0, 0.0, 3, &pairs, 8, 1e-6), Err(Error::Regime(_))));
}

#[test]
fn biangle_operator_properties() {
    let hs: [&(dyn Fn(f64, f64) -> f64 + Sync); 5] = [&|_, _| 1.0, &|x, _| x, &|_, y| y, &|x, y| x * y, &|_, y| y * y];
    let y = BianglePoint::new(0.5, 0.2).unwrap();
    let r = biangle_operator_selfadjoint(2.0, 0.75, &hs, y, 12, 12, 1e-7).unwrap();
    assert!(r.pass, "{r:?}");
    let with_deg: Vec<(&(dyn Fn(f64, f64) -> f64 + Sync), usize)> = hs.iter().zip([0, 1, 1, 2, 2]).map(|(h, d)| (*h, d)).collect();
    assert!(biangle_polynomial_preservation(2.0, 0.75, &with_deg, y, 6, 12).unwrap() < 1e-9);
    let lim = biangle_evaluation_limit(2.0, 0.75, &|a, b| a * a + b, y, &[1e-1, 1e-2, 1e-3], 16).unwrap();
    assert!(lim[2].1 < lim[1].1 && lim[1].1 < lim[0].1 && lim[2].1 < 1e-3);
}

#[test]
fn triangle_product_formula() {
    let r = verify_triangle_product(4.0, 1.0, 0.5, 3, (0.8, 0.5), (0.6, 0.3), TriangleIntegrator::Tensor { nodes: 8 }, 1e-5).unwrap();
    assert!(r.pass, "{r:?}");
    let q = verify_triangle_product(4.0, 1.0, 0.5, 2, (0.8, 0.5), (0.6, 0.3), TriangleIntegrator::Qmc { points: 4096, replicates: 8, seed: 1 }, 0.0)
        .unwrap();
    assert!(q.pass && q.tolerance == 5.0, "{q:?}");
    assert!(matches!(
        verify_triangle_product(2.0, 1.0, 0.5, 2, (0.8, 0.5), (0.6, 0.3), TriangleIntegrator::Tensor { nodes: 4 }, 1e-5),
        Err(Error::Regime(_))
    ));
    // 20^7 evaluations exceed the cap, so the run switches to sampling and says so
    let s = verify_triangle_product(4.0, 1.0, 0.5, 1, (0.8, 0.5), (0.6, 0.3), TriangleIntegrator::Tensor { nodes: 20 }, 1e-5);
    assert!(s.unwrap().notes.iter().any(|n| n.contains("cap")));
}

proptest! {
    #[test]
    fn helper_identities(a in -1.0f64..1.0, b in -1.0f64..1.0, r in 0.0f64..1.0, t in -1.0f64..1.0) {
        let d = helper_d(a, b, r, t).unwrap();
        let e = helper_e(a, b, r, t).unwrap();
        let extra = (1.0 - a * a) * (1.0 - b * b) * r * r * (1.0 - t * t);
        prop_assert!((e * e - d * d - extra).abs() < 1e-12);
        prop_assert!(e <= 1.0 + 1e-12);
        if e > 1e-6 {
            prop_assert!(helper_c(a, b, r, t).unwrap().abs() <= 1.0);
        }
    }
}
