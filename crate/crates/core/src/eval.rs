//! Integrated squared error, leave-one-out cross-validation, Monte-Carlo
//! MISE experiments and empirical convergence rates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{fit, predict_at, CurveEstimate, FitConfig, Hyper, Method};
use crate::sampling::{
    curve_point, equispaced, generate_dataset, random_geodesic, replication_rng, sd_to_contraction, CurveModel,
    Dataset,
};
use crate::sphere::dist_coords;

pub const ISE_GRID_SIZE: usize = 101;
pub const DEFAULT_BANDWIDTHS: [f64; 7] = [0.05, 0.075, 0.1, 0.15, 0.2, 0.3, 0.5];
pub const DEFAULT_MAX_TERMS: usize = 7;

/// Trapezoid rule for `∫ g` over `domain` from samples on an equispaced grid.
fn trapezoid(values: &[f64], domain: (f64, f64)) -> f64 {
    let m = values.len();
    let step = (domain.1 - domain.0) / (m - 1) as f64;
    let inner: f64 = values[1..m - 1].iter().sum();
    step * (inner + 0.5 * (values[0] + values[m - 1]))
}

/// `∫ d(m̂_t, m_t)² dt` over `[0, 1]` by the trapezoid rule on `grid_size`
/// equispaced points.
pub fn ise(estimate: &CurveEstimate, truth: &CurveModel, grid_size: usize) -> Result<f64> {
    ise_on(estimate, truth, grid_size, (0.0, 1.0))
}

/// [`ise`] over an arbitrary covariate domain.
pub fn ise_on(estimate: &CurveEstimate, truth: &CurveModel, grid_size: usize, domain: (f64, f64)) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!("ISE grid needs at least 2 points, got {grid_size}")));
    }
    let values = equispaced(grid_size, domain)
        .into_iter()
        .map(|t| {
            let p = estimate.predict(t)?;
            let d = dist_coords(p.coords(), curve_point(truth, t).coords());
            Ok(d * d)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(trapezoid(&values, domain))
}

/// LOOCV candidates used when none are given.
pub fn default_candidates(method: Method) -> Vec<Hyper> {
    if method.uses_bandwidth() {
        DEFAULT_BANDWIDTHS.iter().map(|&h| Hyper::Bandwidth(h)).collect()
    } else if method.uses_terms() {
        (1..=DEFAULT_MAX_TERMS).map(Hyper::Terms).collect()
    } else {
        vec![Hyper::None]
    }
}

/// Leave-one-out score `Σ_i d(y_i, m̂_{-i}(x_i))²`.
pub fn loocv_score(data: &Dataset, method: Method, hyper: Hyper, cfg: &FitConfig) -> Result<f64> {
    let terms = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let held = data.without(i);
            let p = predict_at(method, &held, hyper, data.xs[i], cfg)?;
            let d = dist_coords(p.coords(), data.ys[i].coords());
            Ok(d * d)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}

/// Candidate with the smallest leave-one-out score. Ties go to the smaller
/// hyperparameter, then to the earlier candidate.
pub fn loocv_select(data: &Dataset, method: Method, candidates: &[Hyper], cfg: &FitConfig) -> Result<Hyper> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no LOOCV candidates".into()));
    }
    let mut best: Option<(Hyper, f64)> = None;
    let mut failures = Vec::new();
    for &cand in candidates {
        match loocv_score(data, method, cand, cfg) {
            Ok(score) => {
                let better = match best {
                    None => true,
                    Some((b, s)) => score < s || (score == s && cand.value() < b.value()),
                };
                if better {
                    best = Some((cand, score));
                }
            }
            Err(e) => failures.push(format!("{cand:?}: {e}")),
        }
    }
    best.map(|(h, _)| h).ok_or(Error::AllCandidatesFailed(failures))
}

/// Regression curve of each replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveSpec {
    Simple,
    Spiral,
    /// A fresh random geodesic with this speed in every replication.
    Geodesic { speed: f64 },
    /// The same curve in every replication.
    Fixed { model: CurveModel },
}

impl CurveSpec {
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<CurveModel> {
        match self {
            CurveSpec::Simple => Ok(CurveModel::Simple),
            CurveSpec::Spiral => Ok(CurveModel::Spiral),
            CurveSpec::Geodesic { speed } => random_geodesic(*speed, rng),
            CurveSpec::Fixed { model } => Ok(model.clone()),
        }
    }

    pub fn is_periodic(&self) -> bool {
        match self {
            CurveSpec::Simple => true,
            CurveSpec::Spiral | CurveSpec::Geodesic { .. } => false,
            CurveSpec::Fixed { model } => model.is_periodic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "values", rename_all = "lowercase")]
pub enum HyperPolicy {
    Fixed(Hyper),
    /// LOOCV over the listed candidates, or the default grid when empty.
    Loocv(Vec<Hyper>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub curve: CurveSpec,
    pub n: usize,
    pub sd: f64,
    pub replications: usize,
    pub seed: u64,
    pub domain: (f64, f64),
    pub hyper: HyperPolicy,
    pub grid_size: usize,
    /// Reflect the data for trigonometric methods; `None` reflects exactly
    /// when the curve is not periodic.
    pub reflect: Option<bool>,
    pub fit: FitConfig,
}

impl ExperimentConfig {
    /// Defaults: fixed default hyperparameter, domain `[0, 1]`, 101-point ISE
    /// grid, automatic reflection, `Λ = 4π` for `LinCos`.
    pub fn new(method: Method, curve: CurveSpec, n: usize, sd: f64, replications: usize, seed: u64) -> Self {
        let fit = FitConfig { lambda_max: Some(4.0 * std::f64::consts::PI), ..FitConfig::default() };
        ExperimentConfig {
            method,
            curve,
            n,
            sd,
            replications,
            seed,
            domain: (0.0, 1.0),
            hyper: HyperPolicy::Fixed(Hyper::None),
            grid_size: ISE_GRID_SIZE,
            reflect: None,
            fit,
        }
    }

    pub fn with_hyper(self, hyper: HyperPolicy) -> Self {
        ExperimentConfig { hyper, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidArgument("replications must be at least 1".into()));
        }
        if self.n < 4 {
            return Err(Error::InvalidArgument(format!("n must be at least 4, got {}", self.n)));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidArgument("grid_size must be at least 2".into()));
        }
        if self.method.uses_bandwidth() && matches!(self.hyper, HyperPolicy::Fixed(Hyper::None)) {
            return Err(Error::InvalidArgument(format!("{} needs a bandwidth or LOOCV", self.method)));
        }
        sd_to_contraction(self.sd)?;
        Ok(())
    }

    fn fit_config(&self) -> FitConfig {
        let reflect = self.reflect.unwrap_or(!self.curve.is_periodic());
        FitConfig { reflect, trace_size: self.grid_size, ..self.fit.clone() }
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub ise: f64,
    pub hyper: Hyper,
}

/// Simulates replication `rep`: draws the curve and the data from the
/// replication stream, selects the hyperparameter, fits and scores.
pub fn run_replication(config: &ExperimentConfig, rep: usize) -> Result<Replication> {
    let mut rng = replication_rng(config.seed, rep as u64);
    let truth = config.curve.draw(&mut rng)?;
    let a = sd_to_contraction(config.sd)?;
    let data = generate_dataset(&truth, config.n, a, config.domain, &mut rng)?;
    let cfg = config.fit_config();
    let hyper = match &config.hyper {
        HyperPolicy::Fixed(h) => *h,
        HyperPolicy::Loocv(cands) if cands.is_empty() => {
            loocv_select(&data, config.method, &default_candidates(config.method), &cfg)?
        }
        HyperPolicy::Loocv(cands) => loocv_select(&data, config.method, cands, &cfg)?,
    };
    let estimate = fit(config.method, &data, hyper, &cfg)?;
    let ise = ise_on(&estimate, &truth, config.grid_size, config.domain)?;
    Ok(Replication { ise, hyper: estimate.hyper })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiseResult {
    pub mise: f64,
    /// Sample standard deviation of the ISE values over `√reps`.
    pub se: f64,
    pub per_rep: Vec<f64>,
    pub hypers: Vec<Hyper>,
}

/// Mean integrated squared error over independent replications, run in
/// parallel. Results do not depend on the thread count.
pub fn run_mise(config: &ExperimentConfig) -> Result<MiseResult> {
    config.validate()?;
    let reps = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect::<Result<Vec<_>>>()?;
    let per_rep: Vec<f64> = reps.iter().map(|r| r.ise).collect();
    let hypers = reps.iter().map(|r| r.hyper).collect();
    let (mise, se) = mean_and_se(&per_rep);
    Ok(MiseResult { mise, se, per_rep, hypers })
}

/// Mean and standard error; the error is 0 for a single value.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheckConfig {
    /// Template experiment; its `n` is replaced by each ladder entry.
    pub base: ExperimentConfig,
    pub ladder: Vec<usize>,
    /// Expected exponent, for reporting (e.g. `-1` for parametric methods).
    pub target_exponent: Option<f64>,
}

impl RateCheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ladder.len() < 3 {
            return Err(Error::InvalidArgument("rate ladder needs at least 3 sample sizes".into()));
        }
        if self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("rate ladder must be strictly increasing".into()));
        }
        self.base.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub ns: Vec<usize>,
    pub mises: Vec<f64>,
    pub ses: Vec<f64>,
    /// Least-squares slope of `log MISE` against `log n`.
    pub slope: f64,
    /// Noiseless setting: the slope only reflects optimizer noise.
    pub degenerate: bool,
}

impl RateResult {
    pub fn strictly_decreasing(&self) -> bool {
        self.mises.windows(2).all(|w| w[1] < w[0])
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn rate_check(config: &RateCheckConfig) -> Result<RateResult> {
    config.validate()?;
    let mut mises = Vec::new();
    let mut ses = Vec::new();
    for &n in &config.ladder {
        let exp = ExperimentConfig { n, ..config.base.clone() };
        let res = run_mise(&exp)?;
        mises.push(res.mise);
        ses.push(res.se);
    }
    let lx: Vec<f64> = config.ladder.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = mises.iter().map(|m| m.max(f64::MIN_POSITIVE).ln()).collect();
    Ok(RateResult {
        ns: config.ladder.clone(),
        slope: ls_slope(&lx, &ly),
        degenerate: config.base.sd == 0.0,
        mises,
        ses,
    })
}
