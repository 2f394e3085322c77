//! Contracted uniform noise on `S^2`, the regression curves of the simulation
//! study, and fixed-design dataset generation.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Point, SpaceKind};
use crate::sphere::{self, from_angles, rotation_to, wrap_angle, AnglePair, SpherePoint, TangentPair};

/// `√((π² − 4)/2)`: noise standard deviation of `CntrUnif(m, 1)`.
pub fn max_sd() -> f64 {
    ((PI * PI - 4.0) / 2.0).sqrt()
}

/// Contracted uniform distribution `CntrUnif(center, a)` on `S^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CntrUnifParams {
    pub center: SpherePoint,
    pub a: f64,
}

impl CntrUnifParams {
    pub fn new(center: SpherePoint, a: f64) -> Result<Self> {
        if center.ambient_dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: center.ambient_dim() });
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidArgument(format!("contraction {a} outside [0, 1]")));
        }
        Ok(CntrUnifParams { center, a })
    }
}

/// Draws the contracted point `Z_a` around the north pole.
fn sample_contracted_north<R: Rng + ?Sized>(a: f64, rng: &mut R) -> [f64; 3] {
    let u: f64 = rng.random();
    let theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
    let phi = TAU * rng.random::<f64>();
    let (st, ct) = (a * theta).sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// One draw from `CntrUnif(center, a)`: `R_m Z_a` with the Householder `R_m`.
pub fn sample_cntr_unif<R: Rng + ?Sized>(params: &CntrUnifParams, rng: &mut R) -> SpherePoint {
    let z = sample_contracted_north(params.a, rng);
    if params.a == 0.0 {
        return params.center.clone();
    }
    let r = rotation_to(&params.center);
    let out: Vec<f64> = (0..3).map(|i| (0..3).map(|j| r[(i, j)] * z[j]).sum()).collect();
    SpherePoint::from_unit(out)
}

/// Contraction `a` giving noise standard deviation `sd`.
pub fn sd_to_contraction(sd: f64) -> Result<f64> {
    let top = max_sd();
    if !(0.0..=top).contains(&sd) {
        return Err(Error::InvalidArgument(format!("sd {sd} outside [0, {top}]")));
    }
    Ok((sd / top).min(1.0))
}

/// Ground-truth regression curves on `S^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurveModel {
    /// `t ↦ Exp(start, t·velocity)`.
    Geodesic { start: SpherePoint, velocity: Vec<f64> },
    /// Angles `(π/4, 1/2 + 2πt)`: a closed small circle, periodic on `[0, 1]`.
    Simple,
    /// Angles `(π/8 + 3πt/4, 1/2 + 3πt)`: a non-periodic spiral.
    Spiral,
}

impl CurveModel {
    pub fn geodesic(pair: TangentPair) -> Self {
        CurveModel::Geodesic { start: pair.base, velocity: pair.vec }
    }

    /// Whether `m(0) = m(1)`, so that trigonometric series apply directly.
    pub fn is_periodic(&self) -> bool {
        matches!(self, CurveModel::Simple)
    }
}

pub fn curve_point(model: &CurveModel, t: f64) -> SpherePoint {
    match model {
        CurveModel::Geodesic { start, velocity } => {
            let v: Vec<f64> = velocity.iter().map(|c| c * t).collect();
            SpherePoint::from_unit(sphere::exp_coords(start.coords(), &v))
        }
        CurveModel::Simple => from_angles(AnglePair::new(FRAC_PI_4, wrap_angle(0.5 + TAU * t))),
        CurveModel::Spiral => {
            from_angles(AnglePair::new(FRAC_PI_8 + 0.75 * PI * t, wrap_angle(0.5 + 3.0 * PI * t)))
        }
    }
}

/// Geodesic with uniform start on `S^2`, uniform direction and the given speed.
pub fn random_geodesic<R: Rng + ?Sized>(speed: f64, rng: &mut R) -> Result<CurveModel> {
    if !(speed >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative speed {speed}")));
    }
    let start = loop {
        let g: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        if sphere::norm(&g) > 1e-12 {
            break SpherePoint::new(g)?;
        }
    };
    let dir = loop {
        let g: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        let t = start.project_tangent(&g);
        let len = sphere::norm(&t);
        if len > 1e-12 {
            break t.into_iter().map(|x| x / len).collect::<Vec<f64>>();
        }
    };
    let velocity = dir.into_iter().map(|x| x * speed).collect();
    Ok(CurveModel::Geodesic { start, velocity })
}

/// Fixed-design regression sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub xs: Vec<f64>,
    pub ys: Vec<Point>,
    pub space: SpaceKind,
    pub domain: (f64, f64),
}

impl Dataset {
    /// Checks the invariants: `n ≥ 2`, sorted covariates inside the domain,
    /// responses in `space`.
    pub fn new(xs: Vec<f64>, ys: Vec<Point>, space: SpaceKind, domain: (f64, f64)) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 observations, got {}", xs.len())));
        }
        if !(domain.0 < domain.1) {
            return Err(Error::InvalidArgument(format!("empty domain {domain:?}")));
        }
        if xs.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidArgument("covariates must be sorted ascending".into()));
        }
        let tol = 1e-12 * (domain.1 - domain.0);
        if xs.iter().any(|&x| x < domain.0 - tol || x > domain.1 + tol) {
            return Err(Error::InvalidArgument("covariate outside the domain".into()));
        }
        space.validate()?;
        if let Some(bad) = ys.iter().position(|y| !space.contains(y)) {
            return Err(Error::SpaceMismatch(format!("observation {bad} is not in {space:?}")));
        }
        Ok(Dataset { xs, ys, space, domain })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// The dataset with observation `i` removed (domain unchanged).
    pub fn without(&self, i: usize) -> Dataset {
        let mut xs = self.xs.clone();
        let mut ys = self.ys.clone();
        xs.remove(i);
        ys.remove(i);
        Dataset { xs, ys, space: self.space, domain: self.domain }
    }

    pub(crate) fn coords(&self) -> Vec<&[f64]> {
        self.ys.iter().map(Point::coords).collect()
    }
}

/// Equispaced design `lo + (i-1)(hi-lo)/(n-1)`, `i = 1..n`.
pub fn equispaced(n: usize, domain: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = domain;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * (hi - lo) / (n - 1) as f64 })
        .collect()
}

/// Samples `y_i ~ CntrUnif(m(x_i), a)` on the equispaced design.
pub fn generate_dataset<R: Rng + ?Sized>(
    model: &CurveModel,
    n: usize,
    a: f64,
    domain: (f64, f64),
    rng: &mut R,
) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n ≥ 2, got {n}")));
    }
    let xs = equispaced(n, domain);
    let mut ys = Vec::with_capacity(n);
    for &x in &xs {
        let params = CntrUnifParams::new(curve_point(model, x), a)?;
        ys.push(Point::Sphere(sample_cntr_unif(&params, rng)));
    }
    Dataset::new(xs, ys, SpaceKind::Sphere(2), domain)
}

/// Independent generator for replication `rep` of a run with `master` seed.
///
/// Streams are ChaCha8 streams keyed by the replication index, so results do
/// not depend on the order in which replications are scheduled.
pub fn replication_rng(master: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(rep);
    rng
}
