//! Geometry of the unit hypersphere `S^k ⊂ R^{k+1}`.
//!
//! Points are stored as unit vectors in the ambient space. The intrinsic
//! distance is the great-circle angle `arccos(q·p)`, the exponential map walks
//! along great circles, and the logarithm is its inverse away from the cut
//! locus (the antipode).

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logarithm maps are refused when the target is this close to the antipode.
pub const ANTIPODAL_GAP: f64 = 1e-8;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Great-circle distance between two unit vectors given as raw coordinates.
///
/// No dimension check; callers in hot loops guarantee equal lengths.
#[inline]
pub fn dist_coords(q: &[f64], p: &[f64]) -> f64 {
    dot(q, p).clamp(-1.0, 1.0).acos()
}

/// A point on the unit hypersphere `S^k`, `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint(Vec<f64>);

impl SpherePoint {
    /// Builds a point from ambient coordinates, renormalizing to unit length.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a sphere point needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        let len = norm(&coords);
        if len < 1e-300 {
            return Err(Error::InvalidArgument("zero vector is not on the sphere".into()));
        }
        Ok(SpherePoint(coords.into_iter().map(|c| c / len).collect()))
    }

    /// Unit basis vector `e_{index+1}` of `R^{ambient}` (zero-based index).
    pub fn basis(ambient: usize, index: usize) -> Self {
        assert!(ambient >= 2 && index < ambient);
        let mut c = vec![0.0; ambient];
        c[index] = 1.0;
        SpherePoint(c)
    }

    /// The "north pole" `e_{k+1}`.
    pub fn north_pole(ambient: usize) -> Self {
        Self::basis(ambient, ambient - 1)
    }

    /// Wraps coordinates that are already unit length up to rounding.
    pub(crate) fn from_unit(mut coords: Vec<f64>) -> Self {
        let len = norm(&coords);
        if (len - 1.0).abs() > 1e-15 {
            coords.iter_mut().for_each(|c| *c /= len);
        }
        SpherePoint(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Intrinsic dimension `k`.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len()
    }

    pub fn antipode(&self) -> Self {
        SpherePoint(self.0.iter().map(|c| -c).collect())
    }

    /// Projects an ambient vector onto the tangent space at this point.
    pub fn project_tangent(&self, v: &[f64]) -> Vec<f64> {
        let c = dot(&self.0, v);
        v.iter().zip(&self.0).map(|(vi, pi)| vi - c * pi).collect()
    }
}

/// A base point together with a tangent vector at that point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentPair {
    pub base: SpherePoint,
    pub vec: Vec<f64>,
}

impl TangentPair {
    /// Checks that `vec` is tangent at `base` (`base·vec = 0` within 1e-10).
    pub fn new(base: SpherePoint, vec: Vec<f64>) -> Result<Self> {
        if vec.len() != base.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: base.ambient_dim(), found: vec.len() });
        }
        let off = dot(base.coords(), &vec);
        if off.abs() > 1e-10 * norm(&vec).max(1.0) {
            return Err(Error::InvalidArgument(format!("vector is not tangent: base·vec = {off:e}")));
        }
        Ok(TangentPair { base, vec })
    }

    /// Projects `vec` onto the tangent space at `base`.
    pub fn projected(base: SpherePoint, vec: &[f64]) -> Self {
        let vec = base.project_tangent(vec);
        TangentPair { base, vec }
    }

    pub fn zero(base: SpherePoint) -> Self {
        let vec = vec![0.0; base.ambient_dim()];
        TangentPair { base, vec }
    }

    pub fn speed(&self) -> f64 {
        norm(&self.vec)
    }
}

/// Polar angles `(θ, φ) ∈ [0, π] × [0, 2π)` of a point on `S^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub theta: f64,
    pub phi: f64,
}

impl AnglePair {
    pub fn new(theta: f64, phi: f64) -> Self {
        AnglePair { theta, phi }
    }
}

/// Intrinsic distance `arccos(q·p)` in `[0, π]`.
pub fn dist(q: &SpherePoint, p: &SpherePoint) -> Result<f64> {
    if q.ambient_dim() != p.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: q.ambient_dim(), found: p.ambient_dim() });
    }
    Ok(dist_coords(q.coords(), p.coords()))
}

/// `Exp(p, v)` on raw coordinates; `|v| = 0` returns `p` unchanged.
pub fn exp_coords(base: &[f64], v: &[f64]) -> Vec<f64> {
    let len = norm(v);
    if len == 0.0 {
        return base.to_vec();
    }
    let (s, c) = len.sin_cos();
    let out: Vec<f64> = base.iter().zip(v).map(|(p, vi)| c * p + s * vi / len).collect();
    let n = norm(&out);
    out.into_iter().map(|x| x / n).collect()
}

/// The exponential map `cos(|v|) p + sin(|v|) v/|v|`.
pub fn exp_map(t: &TangentPair) -> SpherePoint {
    SpherePoint(exp_coords(t.base.coords(), &t.vec))
}

/// Inverse of [`exp_map`]: the tangent vector at `base` pointing to `q` with
/// length `dist(base, q)`.
pub fn log_map(base: &SpherePoint, q: &SpherePoint) -> Result<Vec<f64>> {
    if base.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: base.ambient_dim(), found: q.ambient_dim() });
    }
    let c = dot(base.coords(), q.coords()).clamp(-1.0, 1.0);
    let perp: Vec<f64> = q.coords().iter().zip(base.coords()).map(|(qi, pi)| qi - c * pi).collect();
    let s = norm(&perp);
    let theta = s.atan2(c);
    if theta >= PI - ANTIPODAL_GAP {
        return Err(Error::AntipodalPoints);
    }
    if s == 0.0 {
        return Ok(vec![0.0; base.ambient_dim()]);
    }
    Ok(perp.into_iter().map(|x| x * theta / s).collect())
}

/// Point on `S^2` with polar angle `theta` and azimuth `phi`.
pub fn from_angles(a: AnglePair) -> SpherePoint {
    let (st, ct) = a.theta.sin_cos();
    let (sp, cp) = a.phi.sin_cos();
    SpherePoint::from_unit(vec![st * cp, st * sp, ct])
}

/// Polar angles of a point on `S^2`. At the poles `phi` is reported as 0.
pub fn to_angles(q: &SpherePoint) -> Result<AnglePair> {
    if q.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: q.ambient_dim() });
    }
    let [x, y, z] = [q.0[0], q.0[1], q.0[2]];
    let r = x.hypot(y);
    let theta = r.atan2(z);
    let phi = if r < 1e-14 { 0.0 } else { wrap_angle(y.atan2(x)) };
    Ok(AnglePair { theta, phi })
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Householder reflection `R_m` with `R_m e_{k+1} = m`.
///
/// Returns the identity at `m = e_{k+1}`.
pub fn rotation_to(m: &SpherePoint) -> DMatrix<f64> {
    let d = m.ambient_dim();
    let mut u: Vec<f64> = m.coords().iter().map(|c| -c).collect();
    u[d - 1] += 1.0;
    let uu = dot(&u, &u);
    let mut r = DMatrix::<f64>::identity(d, d);
    if uu < 1e-28 {
        return r;
    }
    for i in 0..d {
        for j in 0..d {
            r[(i, j)] -= 2.0 * u[i] * u[j] / uu;
        }
    }
    r
}

/// Deterministic orthonormal basis of `T_p S^k`: the first `k` columns of
/// [`rotation_to`]`(p)`.
pub fn tangent_basis(p: &SpherePoint) -> Vec<Vec<f64>> {
    let r = rotation_to(p);
    let d = p.ambient_dim();
    (0..d - 1).map(|j| r.column(j).iter().copied().collect()).collect()
}

/// Ambient vector `Σ_j coeffs[j] · basis[j]`.
pub(crate) fn combine(basis: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; basis[0].len()];
    for (b, &c) in basis.iter().zip(coeffs) {
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}
