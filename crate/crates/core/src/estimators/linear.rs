//! Parametric estimators: geodesic least squares, linear Fréchet regression
//! and cosine regression.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{euclidean_start, frechet_argmin, CurveEstimate, FitConfig, Hyper, Method};
use crate::error::{Error, Result};
use crate::metric::{Point, SpaceKind};
use crate::optimize::{self, OptOptions};
use crate::sampling::Dataset;
use crate::sphere::{self, dot, norm, SpherePoint, TangentPair};
use crate::weights::linfre_weights;

/// `Σ_i w_i d(y_i, Exp(p, s_i v))²` on the sphere, without allocating.
pub(crate) fn geodesic_sse(ys: &[&[f64]], steps: &[f64], weights: Option<&[f64]>, p: &[f64], v: &[f64]) -> f64 {
    let speed = norm(v);
    let mut total = 0.0;
    for (i, (y, &s)) in ys.iter().zip(steps).enumerate() {
        let yp = dot(y, p);
        let c = if speed == 0.0 {
            yp
        } else {
            let (sn, cs) = (s * speed).sin_cos();
            cs * yp + sn * dot(y, v) / speed
        };
        let d = c.clamp(-1.0, 1.0).acos();
        total += weights.map_or(1.0, |w| w[i]) * d * d;
    }
    total
}

/// `Σ_i w_i |y_i - p - s_i v|²`.
pub(crate) fn euclidean_line_sse(ys: &[&[f64]], steps: &[f64], weights: Option<&[f64]>, p: &[f64], v: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, (y, &s)) in ys.iter().zip(steps).enumerate() {
        let r: f64 = y.iter().zip(p).zip(v).map(|((yi, pi), vi)| (yi - pi - s * vi).powi(2)).sum();
        total += weights.map_or(1.0, |w| w[i]) * r;
    }
    total
}

/// Candidate geodesics through pairs of locally averaged observations.
fn geodesic_seeds(xs: &[f64], ys: &[&[f64]], vmax: f64) -> Vec<TangentPair> {
    let n = ys.len();
    let radius = (n / 20).max(1);
    let smoothed: Vec<Option<SpherePoint>> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(n - 1);
            let mut acc = vec![0.0; ys[i].len()];
            for y in &ys[lo..=hi] {
                acc.iter_mut().zip(y.iter()).for_each(|(a, b)| *a += b);
            }
            (norm(&acc) > 1e-9).then(|| SpherePoint::from_unit(acc))
        })
        .collect();
    let mut seeds = Vec::new();
    for frac in [0.1, 0.25, 0.5] {
        let lag = ((frac * (n - 1) as f64).round() as usize).clamp(1, n - 1);
        let last = n - 1 - lag;
        for i in [0, last / 2, last] {
            let j = i + lag;
            let (Some(a), Some(b)) = (&smoothed[i], &smoothed[j]) else { continue };
            let Ok(log) = sphere::log_map(a, b) else { continue };
            let gap = xs[j] - xs[i];
            if gap <= 0.0 {
                continue;
            }
            let u: Vec<f64> = log.iter().map(|c| c / gap).collect();
            let speed = norm(&u);
            let (p, v) = if speed == 0.0 {
                (a.clone(), u)
            } else {
                // Walk back along the geodesic to covariate 0.
                let tau = -xs[i] * speed;
                let (s, c) = tau.sin_cos();
                let p: Vec<f64> = a.coords().iter().zip(&u).map(|(ai, ui)| c * ai + s * ui / speed).collect();
                let v: Vec<f64> = a.coords().iter().zip(&u).map(|(ai, ui)| speed * (-s * ai) + c * ui).collect();
                (SpherePoint::from_unit(p), v)
            };
            let mut pair = TangentPair::projected(p, &v);
            let len = pair.speed();
            if len > vmax {
                pair.vec.iter_mut().for_each(|x| *x *= vmax / len);
            }
            seeds.push(pair);
        }
    }
    seeds
}

/// Geodesic least squares `argmin_{(p,v), |v| ≤ vmax} Σ d(y_i, Exp(p, x_i v))²`,
/// predicting `t ↦ Exp(p̂, t v̂)`.
pub fn fit_lin_geo(data: &Dataset, vmax: f64, cfg: &FitConfig) -> Result<CurveEstimate> {
    if !(vmax > 0.0) {
        return Err(Error::InvalidArgument(format!("speed bound must be positive, got {vmax}")));
    }
    let ys = data.coords();
    let space = data.space;
    let (p, v) = match space {
        SpaceKind::Sphere(k) => {
            let seeds = geodesic_seeds(&data.xs, &ys, vmax);
            let f = |p: &SpherePoint, v: &[f64]| geodesic_sse(&ys, &data.xs, None, p.coords(), v);
            let (pair, _) = optimize::minimize_on_tangent_bundle(f, k, vmax, &seeds, &cfg.opts);
            (pair.base.into_coords(), pair.vec)
        }
        SpaceKind::Euclidean(d) => {
            let (mean, scale) = euclidean_start(ys.iter().copied(), d);
            let mut start = mean;
            start.extend(std::iter::repeat_n(0.0, d));
            let f = |z: &[f64]| euclidean_line_sse(&ys, &data.xs, None, &z[..d], &z[d..]);
            let (z, _) = optimize::minimize_euclidean(f, &start, scale, &cfg.opts);
            (z[..d].to_vec(), z[d..].to_vec())
        }
    };
    let predictor = Arc::new(move |t: f64| {
        let step: Vec<f64> = v.iter().map(|c| c * t).collect();
        space.point(space.exp_coords(&p, &step))
    });
    CurveEstimate::build(Method::LinGeo, Hyper::None, data.domain, cfg.trace_size, predictor)
}

/// Linear Fréchet prediction: minimizes `Σ w_i(t) d(y_i, q)²` with the
/// linear-regression weights.
pub fn predict_lin_fre(data: &Dataset, t: f64, opts: &OptOptions) -> Result<Point> {
    let w = linfre_weights(&data.xs, t)?;
    frechet_argmin(data.space, &data.coords(), &w, opts)
}

pub fn fit_lin_fre(data: &Dataset, cfg: &FitConfig) -> Result<CurveEstimate> {
    linfre_weights(&data.xs, data.domain.0)?;
    let data = Arc::new(data.clone());
    let opts = cfg.opts;
    let domain = data.domain;
    let predictor = Arc::new(move |t: f64| predict_lin_fre(&data, t, &opts));
    CurveEstimate::build(Method::LinFre, Hyper::None, domain, cfg.trace_size, predictor)
}

/// Fitted cosine-regression model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinCosModel {
    pub lambda_hat: f64,
    pub lambda_max: f64,
    pub refs: [SpherePoint; 3],
}

/// Least-squares fit of `z ≈ a cos(λx) + b sin(λx)`.
#[derive(Debug, Clone, Copy)]
struct SinusoidDesign {
    /// Inverse Gram matrix entries, or `None` when only the cosine column is used.
    inv: Option<[f64; 3]>,
    cc: f64,
}

impl SinusoidDesign {
    fn new(xs: &[f64], lambda: f64) -> Self {
        let (mut cc, mut cs, mut ss) = (0.0, 0.0, 0.0);
        for &x in xs {
            let (s, c) = (lambda * x).sin_cos();
            cc += c * c;
            cs += c * s;
            ss += s * s;
        }
        let det = cc * ss - cs * cs;
        let inv = if ss > 1e-12 * xs.len() as f64 && det > 1e-10 * cc * ss {
            Some([ss / det, -cs / det, cc / det])
        } else {
            None
        };
        SinusoidDesign { inv, cc }
    }

    /// Coefficients `(a, b)` for moments `(Σ c z, Σ s z)`.
    fn coefficients(&self, cz: f64, sz: f64) -> (f64, f64) {
        match self.inv {
            Some([i00, i01, i11]) => (i00 * cz + i01 * sz, i01 * cz + i11 * sz),
            None => (cz / self.cc, 0.0),
        }
    }
}

fn default_refs() -> [SpherePoint; 3] {
    [SpherePoint::basis(3, 0), SpherePoint::basis(3, 1), SpherePoint::basis(3, 2)]
}

fn lin_cos_residual(xs: &[f64], zs: &[Vec<f64>], lambda: f64) -> f64 {
    let design = SinusoidDesign::new(xs, lambda);
    let mut total = 0.0;
    for z in zs {
        let (mut cz, mut sz) = (0.0, 0.0);
        for (&x, &zi) in xs.iter().zip(z) {
            let (s, c) = (lambda * x).sin_cos();
            cz += c * zi;
            sz += s * zi;
        }
        let (a, b) = design.coefficients(cz, sz);
        total += xs
            .iter()
            .zip(z)
            .map(|(&x, &zi)| {
                let (s, c) = (lambda * x).sin_cos();
                (zi - a * c - b * s).powi(2)
            })
            .sum::<f64>();
    }
    total / (zs.len() * xs.len()) as f64
}

/// Estimates the speed `λ̂ ∈ [0, Λ]` of cosine regression from the three
/// reference points (defaults: `e1, e2, e3`).
pub fn fit_lin_cos(data: &Dataset, lambda_max: f64, refs: Option<[SpherePoint; 3]>, opts: &OptOptions) -> Result<LinCosModel> {
    if data.space != SpaceKind::Sphere(2) {
        return Err(Error::Unsupported("cosine regression is defined on S^2 only".into()));
    }
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidArgument(format!("Λ must be positive, got {lambda_max}")));
    }
    let refs = refs.unwrap_or_else(default_refs);
    if refs.iter().any(|r| r.ambient_dim() != 3) {
        return Err(Error::DimensionMismatch { expected: 3, found: refs[0].ambient_dim() });
    }
    // Three points lie on one great circle iff they are linearly dependent.
    let [a, b, c] = [refs[0].coords(), refs[1].coords(), refs[2].coords()];
    let triple = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
    if triple.abs() < 1e-8 {
        return Err(Error::InvalidArgument("reference points lie on one geodesic".into()));
    }
    let zs: Vec<Vec<f64>> = refs
        .iter()
        .map(|q| data.ys.iter().map(|y| dot(y.coords(), q.coords()).clamp(-1.0, 1.0)).collect())
        .collect();
    let (lambda_hat, _) = optimize::minimize_scalar(|l| lin_cos_residual(&data.xs, &zs, l), 0.0, lambda_max, opts);
    Ok(LinCosModel { lambda_hat, lambda_max, refs })
}

/// Coefficients `κ_i(t)` with `F̂_t(q) = Σ κ_i(t) cos d(y_i, q)`.
///
/// The cosine fit is linear in the responses `z_{q,i} = y_i·q`, so the fitted
/// objective at `t` is the linear functional `q ↦ q·Σ κ_i(t) y_i`.
pub(crate) fn lin_cos_kernel(xs: &[f64], lambda: f64, t: f64) -> Vec<f64> {
    let design = SinusoidDesign::new(xs, lambda);
    let (st, ct) = (lambda * t).sin_cos();
    xs.iter()
        .map(|&x| {
            let (s, c) = (lambda * x).sin_cos();
            let (a, b) = design.coefficients(c, s);
            a * ct + b * st
        })
        .collect()
}

/// Maximizer over `q` of `â_q cos(λ̂t) + b̂_q sin(λ̂t)`.
pub fn predict_lin_cos(model: &LinCosModel, data: &Dataset, t: f64, opts: &OptOptions) -> Result<Point> {
    let kappa = lin_cos_kernel(&data.xs, model.lambda_hat, t);
    let ys = data.coords();
    let objective = |q: &SpherePoint| -> f64 {
        -ys.iter().zip(&kappa).map(|(y, k)| k * dot(y, q.coords())).sum::<f64>()
    };
    let (q, _) = optimize::minimize_on_sphere(objective, 2, opts);
    Ok(Point::Sphere(q))
}

pub(crate) fn lin_cos_estimate(model: LinCosModel, data: &Dataset, cfg: &FitConfig) -> Result<CurveEstimate> {
    let hyper = Hyper::Speed(model.lambda_hat);
    let data = Arc::new(data.clone());
    let opts = cfg.opts;
    let domain = data.domain;
    let predictor = Arc::new(move |t: f64| predict_lin_cos(&model, &data, t, &opts));
    CurveEstimate::build(Method::LinCos, hyper, domain, cfg.trace_size, predictor)
}
