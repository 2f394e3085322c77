//! Local estimators: local geodesic regression and local Fréchet regression.

use std::f64::consts::PI;
use std::sync::Arc;

use super::linear::{euclidean_line_sse, geodesic_sse};
use super::{euclidean_start, frechet_argmin, CurveEstimate, FitConfig, Hyper, Method};
use crate::error::{Error, Result};
use crate::metric::{Point, SpaceKind};
use crate::optimize;
use crate::sampling::Dataset;
use crate::sphere::{norm, SpherePoint, TangentPair};
use crate::weights::{kernel_eval, local_poly_weights, KernelSpec, LocalPolyConfig};

/// Number of times the bandwidth is doubled before giving up.
const MAX_WIDENINGS: usize = 3;

/// Runs `attempt(h)`, doubling `h` on a singular or empty window.
fn with_widening<T>(h: f64, mut attempt: impl FnMut(f64) -> Result<T>) -> Result<T> {
    let mut h = h;
    for round in 0..=MAX_WIDENINGS {
        match attempt(h) {
            Err(Error::NearSingularDesign { .. } | Error::EmptyWindow { .. }) if round < MAX_WIDENINGS => h *= 2.0,
            other => return other,
        }
    }
    unreachable!()
}

fn loc_geo_once(data: &Dataset, t: f64, h: f64, cfg: &FitConfig) -> Result<Point> {
    let spec = KernelSpec::new(cfg.kernel, h)?;
    let mut steps = Vec::new();
    let mut w = Vec::new();
    let mut ys = Vec::new();
    for (x, y) in data.xs.iter().zip(&data.ys) {
        let u = (x - t) / spec.h;
        let k = kernel_eval(spec.kind, u);
        if k > 0.0 {
            steps.push(u);
            w.push(k);
            ys.push(y.coords());
        }
    }
    if w.len() < 2 {
        return Err(Error::EmptyWindow { t });
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);

    match data.space {
        SpaceKind::Sphere(k) => {
            let mut mean = vec![0.0; k + 1];
            for (y, wi) in ys.iter().zip(&w) {
                mean.iter_mut().zip(y.iter()).for_each(|(m, c)| *m += wi * c);
            }
            let seeds: Vec<TangentPair> = if norm(&mean) > 1e-9 {
                vec![TangentPair::zero(SpherePoint::from_unit(mean))]
            } else {
                Vec::new()
            };
            let f = |p: &SpherePoint, v: &[f64]| geodesic_sse(&ys, &steps, Some(&w), p.coords(), v);
            let (pair, _) = optimize::minimize_on_tangent_bundle(f, k, PI, &seeds, &cfg.opts);
            Ok(Point::Sphere(pair.base))
        }
        SpaceKind::Euclidean(d) => {
            let (mean, scale) = euclidean_start(ys.iter().copied(), d);
            let mut start = mean;
            start.extend(std::iter::repeat_n(0.0, d));
            let f = |z: &[f64]| euclidean_line_sse(&ys, &steps, Some(&w), &z[..d], &z[d..]);
            let (z, _) = optimize::minimize_euclidean(f, &start, scale, &cfg.opts);
            Ok(Point::Euclidean(z[..d].to_vec()))
        }
    }
}

/// Local geodesic regression at `t`: fits a geodesic to the kernel-weighted
/// data around `t` and returns its base point.
pub fn predict_loc_geo(data: &Dataset, t: f64, h: f64, cfg: &FitConfig) -> Result<Point> {
    with_widening(h, |h| loc_geo_once(data, t, h, cfg))
}

/// Local Fréchet regression at `t` with local polynomial weights of order
/// `cfg.order`.
pub fn predict_loc_fre(data: &Dataset, t: f64, h: f64, cfg: &FitConfig) -> Result<Point> {
    with_widening(h, |h| {
        let poly = LocalPolyConfig::new(cfg.order, KernelSpec::new(cfg.kernel, h)?)?;
        let weights = local_poly_weights(&data.xs, t, &poly)?;
        frechet_argmin(data.space, &data.coords(), &weights.w, &cfg.opts)
    })
}

pub fn fit_loc_geo(data: &Dataset, h: f64, cfg: &FitConfig) -> Result<CurveEstimate> {
    let shared = Arc::new(data.clone());
    let inner = cfg.clone();
    let predictor = Arc::new(move |t: f64| predict_loc_geo(&shared, t, h, &inner));
    CurveEstimate::build(Method::LocGeo, Hyper::Bandwidth(h), data.domain, cfg.trace_size, predictor)
}

pub fn fit_loc_fre(data: &Dataset, h: f64, cfg: &FitConfig) -> Result<CurveEstimate> {
    let shared = Arc::new(data.clone());
    let inner = cfg.clone();
    let predictor = Arc::new(move |t: f64| predict_loc_fre(&shared, t, h, &inner));
    CurveEstimate::build(Method::LocFre, Hyper::Bandwidth(h), data.domain, cfg.trace_size, predictor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::equispaced;

    fn constant_sphere(n: usize) -> (SpherePoint, Dataset) {
        let y = SpherePoint::new(vec![0.2, 0.4, -0.9]).unwrap();
        let xs = equispaced(n, (0.0, 1.0));
        let ys = vec![Point::Sphere(y.clone()); n];
        (y, Dataset::new(xs, ys, SpaceKind::Sphere(2), (0.0, 1.0)).unwrap())
    }

    #[test]
    fn constant_data_is_reproduced() {
        let (y, data) = constant_sphere(15);
        let cfg = FitConfig::default();
        for t in [0.0, 0.5, 1.0] {
            let g = predict_loc_geo(&data, t, 0.2, &cfg).unwrap();
            let f = predict_loc_fre(&data, t, 0.2, &cfg).unwrap();
            assert!(crate::sphere::dist(g.as_sphere().unwrap(), &y).unwrap() < 1e-5);
            assert!(crate::sphere::dist(f.as_sphere().unwrap(), &y).unwrap() < 1e-5);
        }
    }

    #[test]
    fn narrow_window_is_widened() {
        let (_, data) = constant_sphere(5);
        // h = 0.05 holds one point; doubling reaches 0.4 after three rounds.
        assert!(predict_loc_fre(&data, 0.5, 0.05, &FitConfig::default()).is_ok());
        assert!(matches!(
            predict_loc_fre(&data, 0.5, 0.01, &FitConfig::default()),
            Err(Error::NearSingularDesign { .. })
        ));
        assert!(matches!(predict_loc_geo(&data, 0.5, 0.01, &FitConfig::default()), Err(Error::EmptyWindow { .. })));
    }
}
