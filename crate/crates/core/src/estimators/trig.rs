//! Trigonometric-series estimators and the reflection trick for
//! non-periodic curves.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{euclidean_start, frechet_argmin, CurveEstimate, FitConfig, Hyper, Method};
use crate::error::{Error, Result};
use crate::metric::{Point, SpaceKind};
use crate::optimize::{self, OptOptions};
use crate::sampling::Dataset;
use crate::sphere::{self, combine, dot, norm, tangent_basis, SpherePoint};
use crate::weights::{psi_vec, trifre_weights};

pub const TRIGEO_DEFAULT_TERMS: usize = 3;
pub const TRIFRE_DEFAULT_TERMS: usize = 3;

/// Fitted curve `t ↦ Exp(p, Σ_ℓ ψ_ℓ(t) v_ℓ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriGeoModel {
    pub base: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub space: SpaceKind,
}

impl TriGeoModel {
    pub fn n_terms(&self) -> usize {
        self.vectors.len()
    }

    pub fn predict(&self, t: f64) -> Result<Point> {
        let psi = psi_vec(self.n_terms(), t);
        self.space.point(self.space.exp_coords(&self.base, &combine(&self.vectors, &psi)))
    }
}

/// Chart `(u, c) ↦ (p, v_1..v_N)` around a fixed base point.
struct Chart {
    center: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl Chart {
    fn at(center: &SpherePoint) -> Self {
        Chart { center: center.coords().to_vec(), basis: tangent_basis(center) }
    }

    fn decode(&self, z: &[f64], n_terms: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let k = self.basis.len();
        let p = sphere::exp_coords(&self.center, &combine(&self.basis, &z[..k]));
        let vs = (0..n_terms)
            .map(|l| {
                let raw = combine(&self.basis, &z[k + l * k..k + (l + 1) * k]);
                let along = dot(&raw, &p);
                raw.iter().zip(&p).map(|(r, pi)| r - along * pi).collect()
            })
            .collect();
        (p, vs)
    }

    /// Chart coordinates of the tangent vectors `vs` at the chart center.
    fn encode_vectors(&self, vs: &[Vec<f64>]) -> Vec<f64> {
        vs.iter().flat_map(|v| self.basis.iter().map(move |b| dot(b, v))).collect()
    }
}

fn tri_geo_sse(ys: &[&[f64]], psis: &[Vec<f64>], p: &[f64], vs: &[Vec<f64>], buf: &mut [f64]) -> f64 {
    let mut total = 0.0;
    for (y, psi) in ys.iter().zip(psis) {
        buf.iter_mut().for_each(|b| *b = 0.0);
        for (v, s) in vs.iter().zip(psi) {
            buf.iter_mut().zip(v).for_each(|(b, vi)| *b += s * vi);
        }
        let len = norm(buf);
        let yp = dot(y, p);
        let c = if len == 0.0 { yp } else { len.cos() * yp + len.sin() * dot(y, buf) / len };
        let d = c.clamp(-1.0, 1.0).acos();
        total += d * d;
    }
    total
}

fn sphere_tri_geo(data: &Dataset, k: usize, n_terms: usize, opts: &OptOptions) -> Result<TriGeoModel> {
    let ys = data.coords();
    let n = ys.len() as f64;
    let psis: Vec<Vec<f64>> = data.xs.iter().map(|&x| psi_vec(n_terms, x)).collect();
    let uniform = vec![1.0; ys.len()];
    let Point::Sphere(p0) = frechet_argmin(data.space, &ys, &uniform, opts)? else { unreachable!() };

    // Projection of the log-mapped data onto the basis functions.
    let mut coeffs = vec![vec![0.0; k + 1]; n_terms];
    for (y, psi) in data.ys.iter().zip(&psis) {
        let Some(y) = y.as_sphere() else { continue };
        let Ok(log) = sphere::log_map(&p0, y) else { continue };
        for (c, s) in coeffs.iter_mut().zip(psi) {
            c.iter_mut().zip(&log).for_each(|(ci, li)| *ci += s * li / n);
        }
    }

    let dims = k * (n_terms + 1);
    let mut bounds = vec![(-PI / 2.0, PI / 2.0); k];
    bounds.extend(std::iter::repeat_n((-2.0 * PI, 2.0 * PI), k * n_terms));
    let mut buf = vec![0.0; k + 1];

    let chart = Chart::at(&p0);
    let mut seed = vec![0.0; k];
    seed.extend(chart.encode_vectors(&coeffs));
    let (z, _) = {
        let f = |z: &[f64]| {
            let (p, vs) = chart.decode(z, n_terms);
            tri_geo_sse(&ys, &psis, &p, &vs, &mut buf)
        };
        optimize::minimize_box_from(f, &bounds, &[seed], opts)
    };
    let (p, vs) = chart.decode(&z, n_terms);

    // Polish in a chart centred at the estimate.
    let center = SpherePoint::from_unit(p);
    let polish = Chart::at(&center);
    let mut seed = vec![0.0; k];
    seed.extend(polish.encode_vectors(&vs));
    debug_assert_eq!(seed.len(), dims);
    let polish_opts = OptOptions { n_starts: 0, ..*opts };
    let (z, _) = {
        let f = |z: &[f64]| {
            let (p, vs) = polish.decode(z, n_terms);
            tri_geo_sse(&ys, &psis, &p, &vs, &mut buf)
        };
        optimize::minimize_box_from(f, &bounds, &[seed], &polish_opts)
    };
    let (base, vectors) = polish.decode(&z, n_terms);
    Ok(TriGeoModel { base, vectors, space: data.space })
}

fn euclidean_tri_geo(data: &Dataset, d: usize, n_terms: usize, opts: &OptOptions) -> Result<TriGeoModel> {
    let ys = data.coords();
    let psis: Vec<Vec<f64>> = data.xs.iter().map(|&x| psi_vec(n_terms, x)).collect();
    let (mean, scale) = euclidean_start(ys.iter().copied(), d);
    let mut start = mean;
    start.extend(std::iter::repeat_n(0.0, d * n_terms));
    let f = |z: &[f64]| {
        ys.iter()
            .zip(&psis)
            .map(|(y, psi)| {
                (0..d)
                    .map(|j| {
                        let fit = z[j] + psi.iter().enumerate().map(|(l, s)| s * z[d + l * d + j]).sum::<f64>();
                        (y[j] - fit).powi(2)
                    })
                    .sum::<f64>()
            })
            .sum::<f64>()
    };
    let (z, _) = optimize::minimize_euclidean(f, &start, scale, opts);
    let vectors = (0..n_terms).map(|l| z[d + l * d..d + (l + 1) * d].to_vec()).collect();
    Ok(TriGeoModel { base: z[..d].to_vec(), vectors, space: data.space })
}

/// Least-squares fit of `Exp(p, Σ_{ℓ≤N} ψ_ℓ(x) v_ℓ)` with all `v_ℓ ∈ T_p`.
pub fn fit_tri_geo_model(data: &Dataset, n_terms: usize, opts: &OptOptions) -> Result<TriGeoModel> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    match data.space {
        SpaceKind::Sphere(k) => sphere_tri_geo(data, k, n_terms, opts),
        SpaceKind::Euclidean(d) => euclidean_tri_geo(data, d, n_terms, opts),
    }
}

pub fn fit_tri_geo(data: &Dataset, n_terms: usize, cfg: &FitConfig) -> Result<CurveEstimate> {
    let model = fit_tri_geo_model(data, n_terms, &cfg.opts)?;
    let predictor = Arc::new(move |t: f64| model.predict(t));
    CurveEstimate::build(Method::TriGeo, Hyper::Terms(n_terms), data.domain, cfg.trace_size, predictor)
}

/// Trigonometric Fréchet prediction with `N` basis functions.
pub fn predict_tri_fre(data: &Dataset, t: f64, n_terms: usize, opts: &OptOptions) -> Result<Point> {
    let w = trifre_weights(&data.xs, t, n_terms)?;
    frechet_argmin(data.space, &data.coords(), &w, opts)
}

pub fn fit_tri_fre(data: &Dataset, n_terms: usize, cfg: &FitConfig) -> Result<CurveEstimate> {
    trifre_weights(&data.xs, data.domain.0, n_terms)?;
    let shared = Arc::new(data.clone());
    let opts = cfg.opts;
    let predictor = Arc::new(move |t: f64| predict_tri_fre(&shared, t, n_terms, &opts));
    CurveEstimate::build(Method::TriFre, Hyper::Terms(n_terms), data.domain, cfg.trace_size, predictor)
}

/// Mirrors the data so that a curve on `[0, 1]` becomes the periodic curve
/// `t ↦ m(2t)` for `t < 1/2` and `m(2 - 2t)` after. Covariates become
/// `x_i / 2` followed by `1 - x_i / 2` in reverse order.
pub fn reflect_dataset(data: &Dataset) -> Result<Dataset> {
    if data.domain != (0.0, 1.0) {
        return Err(Error::InvalidArgument(format!("reflection needs the domain [0, 1], got {:?}", data.domain)));
    }
    let mut xs: Vec<f64> = data.xs.iter().map(|x| x / 2.0).collect();
    xs.extend(data.xs.iter().rev().map(|x| 1.0 - x / 2.0));
    let mut ys = data.ys.clone();
    ys.extend(data.ys.iter().rev().cloned());
    Dataset::new(xs, ys, data.space, data.domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::equispaced;

    #[test]
    fn reflection_of_three_points() {
        let ys: Vec<Point> = (0..3).map(|i| Point::Euclidean(vec![i as f64])).collect();
        let data = Dataset::new(vec![0.0, 0.5, 1.0], ys, SpaceKind::Euclidean(1), (0.0, 1.0)).unwrap();
        let r = reflect_dataset(&data).unwrap();
        assert_eq!(r.xs, vec![0.0, 0.25, 0.5, 0.5, 0.75, 1.0]);
        let got: Vec<f64> = r.ys.iter().map(|y| y.coords()[0]).collect();
        assert_eq!(got, vec![0.0, 1.0, 2.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn reflection_needs_unit_domain() {
        let ys = vec![Point::Euclidean(vec![0.0]); 2];
        let data = Dataset::new(vec![0.0, 2.0], ys, SpaceKind::Euclidean(1), (0.0, 2.0)).unwrap();
        assert!(reflect_dataset(&data).is_err());
    }

    #[test]
    fn tri_geo_constant_data() {
        let y = SpherePoint::new(vec![0.5, -0.5, 0.7]).unwrap();
        let xs = equispaced(20, (0.0, 1.0));
        let data = Dataset::new(xs, vec![Point::Sphere(y.clone()); 20], SpaceKind::Sphere(2), (0.0, 1.0)).unwrap();
        let model = fit_tri_geo_model(&data, 1, &OptOptions::default()).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let p = model.predict(t).unwrap();
            assert!(sphere::dist(p.as_sphere().unwrap(), &y).unwrap() < 1e-3);
        }
    }

    #[test]
    fn tri_fre_single_term_is_frechet_mean() {
        let ys: Vec<Point> = [0.0, 1.0, 5.0].iter().map(|&v| Point::Euclidean(vec![v])).collect();
        let data = Dataset::new(vec![0.0, 0.5, 1.0], ys, SpaceKind::Euclidean(1), (0.0, 1.0)).unwrap();
        let p = predict_tri_fre(&data, 0.7, 1, &OptOptions::default()).unwrap();
        assert!((p.coords()[0] - 2.0).abs() < 1e-6);
        assert!(matches!(predict_tri_fre(&data, 0.7, 3, &OptOptions::default()), Err(Error::TooManyTerms { .. })));
    }
}
