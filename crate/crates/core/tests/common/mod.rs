#![allow(dead_code)]

use manifold_regress::sphere::norm;
use manifold_regress::SpherePoint;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn random_point<R: Rng>(ambient: usize, rng: &mut R) -> SpherePoint {
    SpherePoint::new(gaussian(ambient, rng)).unwrap()
}

/// Tangent vector at `p` with uniform direction and length uniform in `[0, max_len]`.
pub fn random_tangent<R: Rng>(p: &SpherePoint, max_len: f64, rng: &mut R) -> Vec<f64> {
    let t = p.project_tangent(&gaussian(p.ambient_dim(), rng));
    let len = rng.random::<f64>() * max_len;
    let n = norm(&t);
    t.iter().map(|x| x * len / n).collect()
}

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
