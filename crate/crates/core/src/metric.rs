//! The two metric spaces estimators are written against: the hypersphere and
//! Euclidean space. Euclidean instances give closed-form oracles for the
//! Fréchet-type estimators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{self, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// `S^k` embedded in `R^{k+1}`.
    Sphere(usize),
    /// `R^d`.
    Euclidean(usize),
}

impl SpaceKind {
    pub fn validate(self) -> Result<Self> {
        match self {
            SpaceKind::Sphere(0) | SpaceKind::Euclidean(0) => {
                Err(Error::InvalidArgument(format!("degenerate space {self:?}")))
            }
            _ => Ok(self),
        }
    }

    /// Number of coordinates used to store a point.
    pub fn ambient_dim(self) -> usize {
        match self {
            SpaceKind::Sphere(k) => k + 1,
            SpaceKind::Euclidean(d) => d,
        }
    }

    /// Dimension of the tangent space (manifold dimension).
    pub fn intrinsic_dim(self) -> usize {
        match self {
            SpaceKind::Sphere(k) => k,
            SpaceKind::Euclidean(d) => d,
        }
    }

    /// Distance on raw coordinates, without membership checks.
    #[inline]
    pub fn dist_coords(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            SpaceKind::Sphere(_) => sphere::dist_coords(a, b),
            SpaceKind::Euclidean(_) => {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
        }
    }

    /// Geodesic `Exp(base, v)`: great-circle walk or plain translation.
    pub(crate) fn exp_coords(self, base: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            SpaceKind::Sphere(_) => sphere::exp_coords(base, v),
            SpaceKind::Euclidean(_) => base.iter().zip(v).map(|(b, x)| b + x).collect(),
        }
    }

    pub fn contains(self, p: &Point) -> bool {
        match (self, p) {
            (SpaceKind::Sphere(k), Point::Sphere(q)) => q.dim() == k,
            (SpaceKind::Euclidean(d), Point::Euclidean(v)) => v.len() == d,
            _ => false,
        }
    }

    /// Wraps coordinates into a point of this space.
    pub fn point(self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: coords.len() });
        }
        match self {
            SpaceKind::Sphere(_) => Ok(Point::Sphere(SpherePoint::new(coords)?)),
            SpaceKind::Euclidean(_) => {
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite coordinate".into()));
                }
                Ok(Point::Euclidean(coords))
            }
        }
    }
}

/// A point of a [`SpaceKind`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Sphere(SpherePoint),
    Euclidean(Vec<f64>),
}

impl Point {
    pub fn coords(&self) -> &[f64] {
        match self {
            Point::Sphere(p) => p.coords(),
            Point::Euclidean(v) => v,
        }
    }

    pub fn as_sphere(&self) -> Option<&SpherePoint> {
        match self {
            Point::Sphere(p) => Some(p),
            Point::Euclidean(_) => None,
        }
    }
}

impl From<SpherePoint> for Point {
    fn from(p: SpherePoint) -> Self {
        Point::Sphere(p)
    }
}

fn check_member(space: SpaceKind, p: &Point) -> Result<()> {
    if space.contains(p) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!("{space:?}")))
    }
}

pub fn space_dist(space: SpaceKind, a: &Point, b: &Point) -> Result<f64> {
    check_member(space, a)?;
    check_member(space, b)?;
    Ok(space.dist_coords(a.coords(), b.coords()))
}

/// `Σ_i w_i d(y_i, q)²`. Weights may be negative.
pub fn weighted_frechet_objective(
    space: SpaceKind,
    points: &[Point],
    weights: &[f64],
    q: &Point,
) -> Result<f64> {
    if points.len() != weights.len() {
        return Err(Error::LengthMismatch { left: points.len(), right: weights.len() });
    }
    check_member(space, q)?;
    let mut total = 0.0;
    for (y, w) in points.iter().zip(weights) {
        check_member(space, y)?;
        let d = space.dist_coords(y.coords(), q.coords());
        total += w * d * d;
    }
    Ok(total)
}

/// Closed-form minimizer `Σ w_i y_i / Σ w_i` of the Euclidean weighted
/// Fréchet objective.
pub fn euclidean_weighted_argmin(points: &[Vec<f64>], weights: &[f64]) -> Result<Vec<f64>> {
    if points.len() != weights.len() {
        return Err(Error::LengthMismatch { left: points.len(), right: weights.len() });
    }
    let total: f64 = weights.iter().sum();
    if total <= 1e-12 {
        return Err(Error::DegenerateWeights(total));
    }
    let d = points.first().map_or(0, Vec::len);
    let mut out = vec![0.0; d];
    for (y, w) in points.iter().zip(weights) {
        if y.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: y.len() });
        }
        for (o, yi) in out.iter_mut().zip(y) {
            *o += w * yi;
        }
    }
    out.iter_mut().for_each(|o| *o /= total);
    Ok(out)
}
