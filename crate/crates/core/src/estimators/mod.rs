//! The seven regression estimators.
//!
//! Geodesic-type estimators (`LinGeo`, `LocGeo`, `TriGeo`) fit a parametric
//! curve through `Exp` by least squares. Fréchet-type estimators (`LinFre`,
//! `LocFre`, `TriFre`) estimate the objective `q ↦ E d(Y_t, q)²` by a linear
//! smoother and minimize the estimate. `LinCos` replaces the squared distance
//! by the cosine of the distance, which makes the objective sinusoidal in `t`
//! along a geodesic.

mod linear;
mod local;
mod trig;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Point, SpaceKind};
use crate::optimize::{self, OptOptions};
use crate::sampling::{equispaced, Dataset};
use crate::sphere::{self, SpherePoint};
use crate::weights::KernelKind;

pub use linear::{fit_lin_cos, fit_lin_fre, fit_lin_geo, predict_lin_cos, predict_lin_fre, LinCosModel};
pub use local::{fit_loc_fre, fit_loc_geo, predict_loc_fre, predict_loc_geo};
pub use trig::{fit_tri_fre, fit_tri_geo, fit_tri_geo_model, predict_tri_fre, reflect_dataset, TriGeoModel};

/// Evaluation points in [`CurveEstimate::trace`].
pub const TRACE_SIZE: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    LinGeo,
    LinFre,
    LinCos,
    LocGeo,
    LocFre,
    TriGeo,
    TriFre,
}

impl Method {
    pub const ALL: [Method; 7] =
        [Method::LinGeo, Method::LinFre, Method::LinCos, Method::LocGeo, Method::LocFre, Method::TriGeo, Method::TriFre];

    pub fn name(self) -> &'static str {
        match self {
            Method::LinGeo => "lingeo",
            Method::LinFre => "linfre",
            Method::LinCos => "lincos",
            Method::LocGeo => "locgeo",
            Method::LocFre => "locfre",
            Method::TriGeo => "trigeo",
            Method::TriFre => "trifre",
        }
    }

    pub fn is_trigonometric(self) -> bool {
        matches!(self, Method::TriGeo | Method::TriFre)
    }

    pub fn uses_bandwidth(self) -> bool {
        matches!(self, Method::LocGeo | Method::LocFre)
    }

    pub fn uses_terms(self) -> bool {
        self.is_trigonometric()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

/// Smoothing or model-size parameter of an estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hyper {
    None,
    /// Kernel bandwidth `h`.
    Bandwidth(f64),
    /// Number of trigonometric basis functions `N`.
    Terms(usize),
    /// Estimated speed `λ̂` (reported by `LinCos`).
    Speed(f64),
}

impl Hyper {
    /// Scalar value used for ordering and reporting.
    pub fn value(self) -> f64 {
        match self {
            Hyper::None => f64::NAN,
            Hyper::Bandwidth(h) => h,
            Hyper::Terms(n) => n as f64,
            Hyper::Speed(l) => l,
        }
    }
}

/// Settings shared by all estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub opts: OptOptions,
    pub kernel: KernelKind,
    /// Local polynomial order for `LocFre`.
    pub order: usize,
    /// Speed bound for `LinGeo` velocities.
    pub speed_bound: f64,
    /// Speed bound `Λ` for `LinCos`; required for that method.
    pub lambda_max: Option<f64>,
    /// Reference points of the three-point measure in `LinCos`.
    pub lincos_refs: Option<[SpherePoint; 3]>,
    /// Fit trigonometric methods on the mirrored data (for non-periodic curves).
    pub reflect: bool,
    pub trace_size: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            opts: OptOptions::default(),
            kernel: KernelKind::Epanechnikov,
            order: 1,
            speed_bound: 4.0 * std::f64::consts::PI,
            lambda_max: None,
            lincos_refs: None,
            reflect: false,
            trace_size: TRACE_SIZE,
        }
    }
}

type Predictor = Arc<dyn Fn(f64) -> Result<Point> + Send + Sync>;

/// A fitted curve: point predictions at any `t` plus a precomputed trace on
/// an equispaced grid of the covariate domain.
#[derive(Clone)]
pub struct CurveEstimate {
    pub method: Method,
    pub hyper: Hyper,
    pub trace: Vec<(f64, Point)>,
    predictor: Predictor,
}

impl fmt::Debug for CurveEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveEstimate")
            .field("method", &self.method)
            .field("hyper", &self.hyper)
            .field("trace_len", &self.trace.len())
            .finish()
    }
}

impl CurveEstimate {
    /// Evaluates `predictor` on `size` equispaced points of `domain`.
    pub(crate) fn build(method: Method, hyper: Hyper, domain: (f64, f64), size: usize, predictor: Predictor) -> Result<Self> {
        let grid = equispaced(size.max(2), domain);
        let trace = grid
            .into_par_iter()
            .map(|t| predictor(t).map(|p| (t, p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CurveEstimate { method, hyper, trace, predictor })
    }

    /// Estimate backed by an arbitrary curve, traced on `size` points of `domain`.
    pub fn from_fn<F>(method: Method, hyper: Hyper, domain: (f64, f64), size: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Point> + Send + Sync + 'static,
    {
        CurveEstimate::build(method, hyper, domain, size, Arc::new(f))
    }

    pub fn predict(&self, t: f64) -> Result<Point> {
        if let Some((_, p)) = self.trace.iter().find(|(s, _)| *s == t) {
            return Ok(p.clone());
        }
        (self.predictor)(t)
    }

    /// Re-parameterizes the estimate as `t ↦ self(map(t))`, keeping the
    /// original predictor.
    pub(crate) fn composed(self, map: fn(f64) -> f64, domain: (f64, f64), size: usize) -> Result<Self> {
        let inner = self.predictor.clone();
        let predictor: Predictor = Arc::new(move |t| inner(map(t)));
        CurveEstimate::build(self.method, self.hyper, domain, size, predictor)
    }
}

/// Fits `method` to `data` with hyperparameter `hyper` (ignored where the
/// method has none; `Hyper::None` selects the method default where one exists).
pub fn fit(method: Method, data: &Dataset, hyper: Hyper, cfg: &FitConfig) -> Result<CurveEstimate> {
    if cfg.reflect && method.is_trigonometric() {
        let mirrored = reflect_dataset(data)?;
        let inner_cfg = FitConfig { reflect: false, trace_size: 2, ..cfg.clone() };
        let inner = fit(method, &mirrored, hyper, &inner_cfg)?;
        return inner.composed(|t| t / 2.0, data.domain, cfg.trace_size);
    }
    match method {
        Method::LinGeo => fit_lin_geo(data, cfg.speed_bound, cfg),
        Method::LinFre => fit_lin_fre(data, cfg),
        Method::LinCos => {
            let model = fit_lin_cos(data, require_lambda(cfg)?, cfg.lincos_refs.clone(), &cfg.opts)?;
            linear::lin_cos_estimate(model, data, cfg)
        }
        Method::LocGeo => fit_loc_geo(data, bandwidth(hyper)?, cfg),
        Method::LocFre => fit_loc_fre(data, bandwidth(hyper)?, cfg),
        Method::TriGeo => fit_tri_geo(data, terms(hyper, trig::TRIGEO_DEFAULT_TERMS)?, cfg),
        Method::TriFre => fit_tri_fre(data, terms(hyper, trig::TRIFRE_DEFAULT_TERMS)?, cfg),
    }
}

/// Prediction of `method` fitted to `data` at a single covariate value. For
/// local and Fréchet methods this avoids computing a full trace.
pub fn predict_at(method: Method, data: &Dataset, hyper: Hyper, t: f64, cfg: &FitConfig) -> Result<Point> {
    if cfg.reflect && method.is_trigonometric() {
        let mirrored = reflect_dataset(data)?;
        let inner_cfg = FitConfig { reflect: false, ..cfg.clone() };
        return predict_at(method, &mirrored, hyper, t / 2.0, &inner_cfg);
    }
    match method {
        Method::LinFre => predict_lin_fre(data, t, &cfg.opts),
        Method::LocGeo => predict_loc_geo(data, t, bandwidth(hyper)?, cfg),
        Method::LocFre => predict_loc_fre(data, t, bandwidth(hyper)?, cfg),
        Method::TriFre => predict_tri_fre(data, t, terms(hyper, trig::TRIFRE_DEFAULT_TERMS)?, &cfg.opts),
        Method::LinGeo | Method::LinCos | Method::TriGeo => {
            let single = FitConfig { trace_size: 2, ..cfg.clone() };
            fit(method, data, hyper, &single)?.predict(t)
        }
    }
}

fn require_lambda(cfg: &FitConfig) -> Result<f64> {
    cfg.lambda_max.ok_or_else(|| Error::InvalidArgument("LinCos needs a speed bound Λ (lambda_max)".into()))
}

fn bandwidth(hyper: Hyper) -> Result<f64> {
    match hyper {
        Hyper::Bandwidth(h) if h > 0.0 => Ok(h),
        other => Err(Error::InvalidArgument(format!("expected a positive bandwidth, got {other:?}"))),
    }
}

fn terms(hyper: Hyper, default: usize) -> Result<usize> {
    match hyper {
        Hyper::Terms(n) if n >= 1 => Ok(n),
        Hyper::None => Ok(default),
        other => Err(Error::InvalidArgument(format!("expected a number of basis functions, got {other:?}"))),
    }
}

/// Minimizes `q ↦ Σ w_i d(y_i, q)²` over the space. Zero weights are skipped.
pub(crate) fn frechet_argmin(space: SpaceKind, ys: &[&[f64]], w: &[f64], opts: &OptOptions) -> Result<Point> {
    let active: Vec<(&[f64], f64)> = ys.iter().zip(w).filter(|(_, &wi)| wi != 0.0).map(|(y, &wi)| (*y, wi)).collect();
    if active.is_empty() {
        return Err(Error::DegenerateWeights(0.0));
    }
    match space {
        SpaceKind::Sphere(k) => {
            let objective = |q: &SpherePoint| {
                let q = q.coords();
                active.iter().map(|(y, wi)| {
                    let d = sphere::dist_coords(y, q);
                    wi * d * d
                }).sum::<f64>()
            };
            let (q, _) = optimize::minimize_on_sphere(objective, k, opts);
            Ok(Point::Sphere(q))
        }
        SpaceKind::Euclidean(d) => {
            let total: f64 = active.iter().map(|(_, wi)| wi).sum();
            if total <= 1e-12 {
                // The objective is unbounded below.
                return Err(Error::DegenerateWeights(total));
            }
            let (start, scale) = euclidean_start(active.iter().map(|(y, _)| *y), d);
            let objective = |q: &[f64]| {
                active.iter().map(|(y, wi)| wi * y.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).sum::<f64>()
            };
            let (q, _) = optimize::minimize_euclidean(objective, &start, scale, opts);
            Ok(Point::Euclidean(q))
        }
    }
}

/// Unweighted centroid and a typical spread of a point cloud, used to start
/// Euclidean searches.
pub(crate) fn euclidean_start<'a>(points: impl Iterator<Item = &'a [f64]>, d: usize) -> (Vec<f64>, f64) {
    let pts: Vec<&[f64]> = points.collect();
    let mut mean = vec![0.0; d];
    for p in &pts {
        for (m, x) in mean.iter_mut().zip(p.iter()) {
            *m += x / pts.len() as f64;
        }
    }
    let var = pts
        .iter()
        .map(|p| p.iter().zip(&mean).map(|(x, m)| (x - m) * (x - m)).sum::<f64>())
        .sum::<f64>()
        / pts.len() as f64;
    (mean, var.sqrt().max(1e-3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
        assert_eq!("LocFre".parse::<Method>().unwrap(), Method::LocFre);
    }

    #[test]
    fn hyper_validation() {
        assert!(bandwidth(Hyper::Terms(3)).is_err());
        assert!(bandwidth(Hyper::Bandwidth(-0.1)).is_err());
        assert_eq!(terms(Hyper::None, 3).unwrap(), 3);
        assert!(terms(Hyper::Terms(0), 3).is_err());
    }
}
