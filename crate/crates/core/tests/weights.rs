use manifold_regress::weights::{
    kernel_eval, linfre_weights, local_poly_weights, psi_vec, trifre_weights, trig_psi,
};
use manifold_regress::{Error, KernelKind, KernelSpec, LocalPolyConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn design(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn grid_i_over_n(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

#[test]
fn local_linear_hand_example() {
    let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let w = local_poly_weights(&xs, 0.5, &LocalPolyConfig::local_linear(0.3).unwrap()).unwrap().w;
    let expected = [0.0, 11.0 / 58.0, 18.0 / 29.0, 11.0 / 58.0, 0.0];
    for (a, b) in w.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{w:?}");
    }
}

#[test]
fn weight_lemma_grid() {
    for n in [20, 80] {
        let xs = design(n);
        for h in [0.1, 0.3] {
            let cfg = LocalPolyConfig::local_linear(h).unwrap();
            for j in 0..=10 {
                let t = j as f64 / 10.0;
                let w = local_poly_weights(&xs, t, &cfg).unwrap().w;
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                for (x, wi) in xs.iter().zip(&w) {
                    if (x - t).abs() > h {
                        assert_eq!(*wi, 0.0);
                    }
                }
                let abs_sum: f64 = w.iter().map(|v| v.abs()).sum();
                let peak = n as f64 * h * w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(abs_sum <= 50.0 && peak <= 50.0, "n={n} h={h} t={t}: {abs_sum} {peak}");
            }
        }
    }
}

#[test]
fn polynomial_annihilation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for order in 0..=3 {
        for n in [20, 80] {
            let xs = design(n);
            let h = 0.3;
            let cfg = LocalPolyConfig::new(order, KernelSpec::epanechnikov(h).unwrap()).unwrap();
            for _ in 0..20 {
                let t: f64 = rng.random();
                let w = local_poly_weights(&xs, t, &cfg).unwrap().w;
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                for j in 1..=order {
                    let m: f64 = xs.iter().zip(&w).map(|(x, wi)| wi * ((x - t) / h).powi(j as i32)).sum();
                    assert!(m.abs() < 1e-8, "order {order} j {j}: {m}");
                }
            }
        }
    }
}

#[test]
fn local_linear_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.random_range(10..60);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        xs.sort_by(f64::total_cmp);
        let h = rng.random_range(0.2..0.6);
        let t: f64 = rng.random_range(0.1..0.9);
        let Ok(wv) = local_poly_weights(&xs, t, &LocalPolyConfig::local_linear(h).unwrap()) else { continue };
        let k: Vec<f64> = xs.iter().map(|x| kernel_eval(KernelKind::Epanechnikov, (x - t) / h)).collect();
        let s1: f64 = xs.iter().zip(&k).map(|(x, ki)| ki * (x - t)).sum();
        let s2: f64 = xs.iter().zip(&k).map(|(x, ki)| ki * (x - t).powi(2)).sum();
        let raw: Vec<f64> = xs.iter().zip(&k).map(|(x, ki)| ki * (s2 - (x - t) * s1)).collect();
        let total: f64 = raw.iter().sum();
        for (a, b) in wv.w.iter().zip(&raw) {
            assert!((a - b / total).abs() < 1e-10);
        }
    }
}

#[test]
fn nadaraya_watson_at_order_zero() {
    let xs = design(15);
    let cfg = LocalPolyConfig::new(0, KernelSpec::epanechnikov(0.2).unwrap()).unwrap();
    let w = local_poly_weights(&xs, 0.37, &cfg).unwrap().w;
    let k: Vec<f64> = xs.iter().map(|x| kernel_eval(KernelKind::Epanechnikov, (x - 0.37) / 0.2)).collect();
    let total: f64 = k.iter().sum();
    for (a, b) in w.iter().zip(&k) {
        assert!((a - b / total).abs() < 1e-12);
    }
}

#[test]
fn empty_window_is_singular() {
    let xs = [0.0, 0.1, 0.9, 1.0];
    let err = local_poly_weights(&xs, 0.5, &LocalPolyConfig::local_linear(0.2).unwrap()).unwrap_err();
    assert!(matches!(err, Error::NearSingularDesign { .. }));
}

#[test]
fn linfre_reproduces_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.random_range(3..40);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..3.0)).collect();
        let t = rng.random_range(-1.0..2.0);
        let w = linfre_weights(&xs, t).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let first: f64 = w.iter().zip(&xs).map(|(a, x)| a * x).sum();
        assert!((first - t).abs() < 1e-10);
    }
    assert!(matches!(linfre_weights(&[0.5, 0.5, 0.5], 0.2), Err(Error::SingularDesign)));
}

#[test]
fn discrete_orthonormality() {
    for n in [8, 32] {
        let xs = grid_i_over_n(n);
        for k in 1..n {
            for l in 1..n {
                let g: f64 = xs.iter().map(|&x| trig_psi(k, x) * trig_psi(l, x)).sum::<f64>() / n as f64;
                let e = if k == l { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-10, "n={n} k={k} l={l}: {g}");
            }
        }
    }
}

#[test]
fn trifre_weights_reproduce_basis() {
    let xs = grid_i_over_n(8);
    for t in [0.0, 0.13, 0.5, 0.91] {
        let w = trifre_weights(&xs, t, 3).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 1..=3 {
            let s: f64 = xs.iter().zip(&w).map(|(&x, wi)| wi * trig_psi(k, x)).sum();
            assert!((s - trig_psi(k, t)).abs() < 1e-12);
        }
    }
    assert!(matches!(trifre_weights(&xs, 0.2, 8), Err(Error::TooManyTerms { .. })));
    assert!(trifre_weights(&xs, 0.2, 0).is_err());
}

#[test]
fn bessel_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [8, 32] {
        let xs = grid_i_over_n(n);
        for _ in 0..100 {
            let f: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let n_terms = rng.random_range(1..n);
            let mut coef = vec![0.0; n_terms];
            for (x, fx) in xs.iter().zip(&f) {
                for (c, p) in coef.iter_mut().zip(psi_vec(n_terms, *x)) {
                    *c += p * fx / n as f64;
                }
            }
            let lhs: f64 = coef.iter().map(|c| c * c).sum();
            let rhs: f64 = f.iter().map(|v| v * v).sum::<f64>() / n as f64;
            assert!(lhs <= rhs + 1e-12);
        }
    }
}

#[test]
fn kernel_support() {
    assert_eq!(kernel_eval(KernelKind::Epanechnikov, 1.5), 0.0);
    assert_eq!(kernel_eval(KernelKind::Epanechnikov, -1.5), 0.0);
    assert_eq!(kernel_eval(KernelKind::Epanechnikov, 0.0), 0.75);
    assert!(KernelSpec::new(KernelKind::Rectangular, -1.0).is_err());
}
