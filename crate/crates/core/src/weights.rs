//! Smoothing kernels, linear-smoother weight vectors and the trigonometric
//! basis of `L2[0, 1]`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Design matrices whose smallest eigenvalue falls below this are rejected.
pub const MIN_EIGEN_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// `3/4 (1 - u²)` on `[-1, 1]`.
    Epanechnikov,
    /// Indicator of `[-1/2, 1/2]`.
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub h: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}")));
        }
        Ok(KernelSpec { kind, h })
    }

    pub fn epanechnikov(h: f64) -> Result<Self> {
        Self::new(KernelKind::Epanechnikov, h)
    }

    /// `K_h(x) = K(x/h)/h`.
    pub fn scaled(&self, x: f64) -> f64 {
        kernel_eval(self.kind, x / self.h) / self.h
    }
}

pub fn kernel_eval(kind: KernelKind, u: f64) -> f64 {
    match kind {
        KernelKind::Epanechnikov => {
            if u.abs() <= 1.0 {
                0.75 * (1.0 - u * u)
            } else {
                0.0
            }
        }
        KernelKind::Rectangular => {
            if u.abs() <= 0.5 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Trigonometric basis function `ψ_k`, `k ≥ 1`:
/// `ψ_1 = 1`, `ψ_{2j} = √2 cos(2πjx)`, `ψ_{2j+1} = √2 sin(2πjx)`.
pub fn trig_psi(k: usize, x: f64) -> f64 {
    assert!(k >= 1, "trigonometric basis is indexed from 1");
    if k == 1 {
        return 1.0;
    }
    let freq = (k / 2) as f64;
    let arg = 2.0 * PI * freq * x;
    if k.is_multiple_of(2) {
        SQRT_2 * arg.cos()
    } else {
        SQRT_2 * arg.sin()
    }
}

/// `(ψ_1(x), …, ψ_N(x))`.
pub fn psi_vec(n_terms: usize, x: f64) -> Vec<f64> {
    (1..=n_terms).map(|k| trig_psi(k, x)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigBasisConfig {
    pub n_terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPolyConfig {
    pub order: usize,
    pub kernel: KernelSpec,
}

impl LocalPolyConfig {
    pub fn new(order: usize, kernel: KernelSpec) -> Result<Self> {
        if order > 3 {
            return Err(Error::InvalidArgument(format!("local polynomial order {order} > 3")));
        }
        Ok(LocalPolyConfig { order, kernel })
    }

    /// Local linear smoothing with the Epanechnikov kernel.
    pub fn local_linear(h: f64) -> Result<Self> {
        Self::new(1, KernelSpec::epanechnikov(h)?)
    }
}

/// Weights of a linear smoother at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub w: Vec<f64>,
    pub eval_point: f64,
    /// Smallest eigenvalue of the local design matrix (NaN when not applicable).
    pub min_eigen: f64,
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|i| i as f64).product()
}

/// `Ψ(u) = (u^j / j!)_{j=0..ℓ}`.
fn poly_features(order: usize, u: f64) -> Vec<f64> {
    (0..=order).map(|j| u.powi(j as i32) / factorial(j)).collect()
}

/// Local polynomial weights of order `ℓ` at `t`.
///
/// Builds `B = (1/nh) Σ Ψ(u_i) Ψ(u_i)ᵀ K(u_i)` with `u_i = (x_i - t)/h` and
/// returns `w_i = (1/nh) Ψ(0)ᵀ B⁻¹ Ψ(u_i) K(u_i)`, which sum to one.
pub fn local_poly_weights(xs: &[f64], t: f64, cfg: &LocalPolyConfig) -> Result<WeightVector> {
    let n = xs.len();
    let order = cfg.order;
    if n < order + 1 {
        return Err(Error::InvalidArgument(format!("{n} observations for order {order}")));
    }
    let h = cfg.kernel.h;
    let scale = 1.0 / (n as f64 * h);
    let dim = order + 1;
    let mut b = DMatrix::<f64>::zeros(dim, dim);
    let mut feats = Vec::with_capacity(n);
    for &x in xs {
        let u = (x - t) / h;
        let k = kernel_eval(cfg.kernel.kind, u);
        let psi = poly_features(order, u);
        if k != 0.0 {
            for r in 0..dim {
                for c in 0..dim {
                    b[(r, c)] += scale * psi[r] * psi[c] * k;
                }
            }
        }
        feats.push((psi, k));
    }
    let min_eigen = b.clone().symmetric_eigen().eigenvalues.min();
    if !(min_eigen >= MIN_EIGEN_THRESHOLD) {
        return Err(Error::NearSingularDesign { min_eigen });
    }
    // B is symmetric positive definite here; solve B a = Ψ(0) once.
    let mut e0 = DVector::<f64>::zeros(dim);
    e0[0] = 1.0;
    let a = b.cholesky().ok_or(Error::NearSingularDesign { min_eigen })?.solve(&e0);
    let w = feats
        .iter()
        .map(|(psi, k)| {
            if *k == 0.0 {
                0.0
            } else {
                scale * k * psi.iter().zip(a.iter()).map(|(p, ai)| p * ai).sum::<f64>()
            }
        })
        .collect();
    Ok(WeightVector { w, eval_point: t, min_eigen })
}

/// Linear Fréchet weights `w_i = (1, t) B⁻¹ (1, x_i)ᵀ`, `B = Σ (1, x_i)ᵀ(1, x_i)`.
pub fn linfre_weights(xs: &[f64], t: f64) -> Result<Vec<f64>> {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let det = n * sxx - sx * sx;
    // Scale-aware singularity test: det = n Σ (x_i - x̄)².
    if !(det > 1e-12 * n * (sxx + 1.0)) {
        return Err(Error::SingularDesign);
    }
    // B⁻¹ = [[sxx, -sx], [-sx, n]] / det
    let c0 = (sxx - t * sx) / det;
    let c1 = (n * t - sx) / det;
    Ok(xs.iter().map(|x| c0 + c1 * x).collect())
}

/// Trigonometric-series weights `w_i = Ψ_N(t)ᵀ Ψ_N(x_i) / n`.
pub fn trifre_weights(xs: &[f64], t: f64, n_terms: usize) -> Result<Vec<f64>> {
    let n = xs.len();
    if n_terms == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if n_terms >= n {
        return Err(Error::TooManyTerms { n_terms, n });
    }
    let at_t = psi_vec(n_terms, t);
    Ok(xs
        .iter()
        .map(|&x| {
            psi_vec(n_terms, x).iter().zip(&at_t).map(|(a, b)| a * b).sum::<f64>() / n as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn kernels() {
        assert_eq!(kernel_eval(KernelKind::Epanechnikov, 0.0), 0.75);
        assert_eq!(kernel_eval(KernelKind::Epanechnikov, 1.5), 0.0);
        assert_eq!(kernel_eval(KernelKind::Epanechnikov, -1.5), 0.0);
        assert_eq!(kernel_eval(KernelKind::Rectangular, 0.4), 1.0);
        assert_eq!(kernel_eval(KernelKind::Rectangular, 0.6), 0.0);
        assert!(KernelSpec::epanechnikov(0.0).is_err());
    }

    #[test]
    fn trig_basis_values() {
        assert_eq!(trig_psi(1, 0.37), 1.0);
        assert_eq!(trig_psi(2, 0.0), SQRT_2);
        assert!((trig_psi(3, 0.25) - SQRT_2).abs() < 1e-15);
        assert!((trig_psi(4, 0.25) + SQRT_2).abs() < 1e-15);
        assert_eq!(psi_vec(3, 0.0), vec![1.0, SQRT_2, 0.0]);
    }

    #[test]
    fn order_zero_is_nadaraya_watson() {
        let xs = grid(11);
        let cfg = LocalPolyConfig::new(0, KernelSpec::epanechnikov(0.25).unwrap()).unwrap();
        let w = local_poly_weights(&xs, 0.33, &cfg).unwrap().w;
        let k: Vec<f64> = xs.iter().map(|x| cfg.kernel.scaled(x - 0.33)).collect();
        let total: f64 = k.iter().sum();
        for (wi, ki) in w.iter().zip(&k) {
            assert!((wi - ki / total).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_design_reduces_to_nadaraya_watson() {
        let xs: Vec<f64> = (0..9).map(|i| 0.1 + 0.1 * i as f64).collect();
        let t = 0.5;
        let lin = local_poly_weights(&xs, t, &LocalPolyConfig::local_linear(0.35).unwrap()).unwrap();
        let cfg0 = LocalPolyConfig::new(0, KernelSpec::epanechnikov(0.35).unwrap()).unwrap();
        let nw = local_poly_weights(&xs, t, &cfg0).unwrap();
        for (a, b) in lin.w.iter().zip(&nw.w) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn five_point_local_linear() {
        // Oracle: hand-solved 2x2 normal equations.
        let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let (t, h) = (0.5, 0.3);
        let w = local_poly_weights(&xs, t, &LocalPolyConfig::local_linear(h).unwrap()).unwrap();
        // Only x = 0.25, 0.5, 0.75 lie inside the window; u = -5/6, 0, 5/6.
        let k_side = 0.75 * (1.0 - 25.0 / 36.0);
        let k_mid = 0.75;
        let total = 2.0 * k_side + k_mid;
        let expected = [0.0, k_side / total, k_mid / total, k_side / total, 0.0];
        for (a, b) in w.w.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14, "{:?}", w.w);
        }
        let s: f64 = w.w.iter().sum();
        let m: f64 = w.w.iter().zip(&xs).map(|(wi, x)| wi * (x - t)).sum();
        assert!((s - 1.0).abs() < 1e-14 && m.abs() < 1e-14);
    }

    #[test]
    fn local_linear_matches_closed_form() {
        let xs = grid(17);
        for &t in &[0.0, 0.13, 0.5, 0.91, 1.0] {
            let kern = KernelSpec::epanechnikov(0.2).unwrap();
            let w = local_poly_weights(&xs, t, &LocalPolyConfig::new(1, kern).unwrap()).unwrap().w;
            let a = |k: i32| xs.iter().map(|x| (x - t).powi(k) * kern.scaled(x - t)).sum::<f64>();
            let (a0, a1, a2) = (a(0), a(1), a(2));
            for (wi, x) in w.iter().zip(&xs) {
                let closed = (a2 - (x - t) * a1) / (a0 * a2 - a1 * a1) * kern.scaled(x - t);
                assert!((wi - closed).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn empty_window_is_singular() {
        let xs = grid(5);
        let err = local_poly_weights(&xs, 0.1, &LocalPolyConfig::local_linear(0.05).unwrap());
        assert!(matches!(err, Err(Error::NearSingularDesign { .. })));
    }

    #[test]
    fn linfre_examples() {
        assert_eq!(linfre_weights(&[-1.0, 1.0], 0.0).unwrap(), vec![0.5, 0.5]);
        assert_eq!(linfre_weights(&[0.3, 0.3, 0.3], 0.3), Err(Error::SingularDesign));
        let xs = [0.0, 0.1, 0.45, 0.8, 0.95];
        let w = linfre_weights(&xs, 0.7).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((w.iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn trifre_examples() {
        let xs: Vec<f64> = (1..=8).map(|i| i as f64 / 8.0).collect();
        let w = trifre_weights(&xs, 0.3, 1).unwrap();
        assert!(w.iter().all(|&wi| (wi - 0.125).abs() < 1e-15));
        let t = 0.3;
        let w = trifre_weights(&xs, t, 3).unwrap();
        for k in 1..=3 {
            let repro: f64 = w.iter().zip(&xs).map(|(wi, &x)| wi * trig_psi(k, x)).sum();
            assert!((repro - trig_psi(k, t)).abs() < 1e-12);
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(trifre_weights(&xs, t, 8), Err(Error::TooManyTerms { n_terms: 8, n: 8 }));
    }
}
