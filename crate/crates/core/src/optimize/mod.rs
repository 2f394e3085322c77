//! Derivative-free minimization over the sphere, the tangent bundle of the
//! sphere, boxes, scalar intervals and unconstrained Euclidean space.
//!
//! Sphere problems use a two-stage scheme: a deterministic coarse grid locates
//! the basin, then Nelder–Mead refines in a tangent chart `u ↦ Exp(c, B u)`
//! centred at the current best point. The chart is re-centred between
//! refinement rounds so that the simplex never has to travel far from its
//! origin. Every evaluated point lies on the sphere.

pub mod nelder_mead;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::sphere::{self, norm, SpherePoint, TangentPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptOptions {
    /// Points in the coarse sphere grid.
    pub coarse_grid_size: usize,
    /// Nelder–Mead iterations per chart dimension and refinement round.
    pub refine_iters: usize,
    /// Objective tolerance.
    pub tol: f64,
    /// Argument tolerance, in chart coordinates.
    pub xtol: f64,
    /// Multi-start count for box problems.
    pub n_starts: usize,
    pub seed: u64,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions { coarse_grid_size: 512, refine_iters: 200, tol: 1e-9, xtol: 1e-9, n_starts: 8, seed: 0 }
    }
}

impl OptOptions {
    pub fn with_seed(self, seed: u64) -> Self {
        OptOptions { seed, ..self }
    }

    fn settings(&self, dims: usize) -> nelder_mead::Settings {
        nelder_mead::Settings { max_iter: self.refine_iters * dims.max(1), ftol: self.tol, xtol: self.xtol }
    }
}

/// Initial simplex edges (radians) of the successive refinement rounds.
const ROUND_STEPS: [f64; 3] = [0.1, 0.01, 0.001];

/// Near-uniform deterministic point set on `S^2` (Fibonacci spiral).
pub fn fibonacci_lattice(size: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..size)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / size as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            SpherePoint::from_unit(vec![r * c, r * s, z])
        })
        .collect()
}

/// Coarse grid on `S^k`: the Fibonacci lattice for `k = 2`, seeded normalized
/// Gaussian vectors otherwise.
pub fn coarse_grid(k: usize, opts: &OptOptions) -> Vec<SpherePoint> {
    if k == 2 {
        return fibonacci_lattice(opts.coarse_grid_size);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_9e37);
    let mut out = Vec::with_capacity(opts.coarse_grid_size);
    while out.len() < opts.coarse_grid_size {
        let v: Vec<f64> = (0..=k).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(p) = SpherePoint::new(v) {
            out.push(p);
        }
    }
    out
}

/// Minimizes `f` over `S^k`. Deterministic given `opts`.
pub fn minimize_on_sphere<F>(mut f: F, k: usize, opts: &OptOptions) -> (SpherePoint, f64)
where
    F: FnMut(&SpherePoint) -> f64,
{
    let grid = coarse_grid(k, opts);
    let (start, f_start) = grid
        .into_iter()
        .map(|p| {
            let v = f(&p);
            (p, if v.is_nan() { f64::INFINITY } else { v })
        })
        .fold(None, |best: Option<(SpherePoint, f64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .expect("coarse grid is never empty");
    refine_on_sphere(&mut f, start, f_start, opts)
}

/// Nelder–Mead refinement in re-centred tangent charts, starting from a
/// point whose value is already known.
pub fn refine_on_sphere<F>(f: &mut F, start: SpherePoint, f_start: f64, opts: &OptOptions) -> (SpherePoint, f64)
where
    F: FnMut(&SpherePoint) -> f64,
{
    let k = start.dim();
    let (mut center, mut value) = (start, f_start);
    for step in ROUND_STEPS {
        let basis = sphere::tangent_basis(&center);
        let chart = |u: &[f64]| SpherePoint::from_unit(sphere::exp_coords(center.coords(), &sphere::combine(&basis, u)));
        let out = nelder_mead::minimize(|u| f(&chart(u)), &vec![0.0; k], &vec![step; k], opts.settings(k));
        let moved = norm(&out.x);
        let improvement = value - out.fx;
        if out.fx < value {
            center = chart(&out.x);
            value = out.fx;
        }
        if improvement <= opts.tol && moved <= opts.xtol {
            break;
        }
    }
    (center, value)
}

/// Tangent vectors per candidate base point in the coarse tangent-bundle search.
const BUNDLE_DIRECTIONS: usize = 32;
/// Grid points (ranked by `f(p, 0)`) kept for the velocity search.
const BUNDLE_KEEP: usize = 4;
/// Coarse candidates refined by Nelder–Mead.
const BUNDLE_REFINE: usize = 2;

fn clamp_speed(v: &mut [f64], vmax: f64) {
    let len = norm(v);
    if len > vmax {
        v.iter_mut().for_each(|x| *x *= vmax / len);
    }
}

fn random_tangent<R: Rng>(p: &SpherePoint, vmax: f64, rng: &mut R) -> Vec<f64> {
    let k = p.dim();
    loop {
        let g: Vec<f64> = (0..=k).map(|_| rng.sample(StandardNormal)).collect();
        let t = p.project_tangent(&g);
        let len = norm(&t);
        if len > 1e-12 {
            let radius = vmax * rng.random::<f64>().powf(1.0 / k as f64);
            return t.into_iter().map(|x| x * radius / len).collect();
        }
    }
}

/// Minimizes `f(p, v)` over pairs `p ∈ S^k`, `v ∈ T_p S^k` with `|v| ≤ vmax`.
///
/// Coarse stage: the sphere grid ranked by `f(p, 0)`, then random tangent
/// vectors at the best grid points and at the bases of `seeds` (the seeds
/// themselves are candidates too). Refinement: Nelder–Mead in a `2k`-dimensional
/// chart, where `p = Exp(p₀, B u)` and `v` is `v₀ + B c` projected onto
/// `T_p S^k`, then clamped to `vmax`.
pub fn minimize_on_tangent_bundle<F>(
    mut f: F,
    k: usize,
    vmax: f64,
    seeds: &[TangentPair],
    opts: &OptOptions,
) -> (TangentPair, f64)
where
    F: FnMut(&SpherePoint, &[f64]) -> f64,
{
    assert!(vmax > 0.0, "speed bound must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let zero = vec![0.0; k + 1];
    let mut eval = |p: &SpherePoint, v: &[f64]| {
        let val = f(p, v);
        if val.is_nan() {
            f64::INFINITY
        } else {
            val
        }
    };

    let mut ranked: Vec<(SpherePoint, f64)> =
        coarse_grid(k, opts).into_iter().map(|p| {
            let v = eval(&p, &zero);
            (p, v)
        }).collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
    ranked.truncate(BUNDLE_KEEP);

    let mut candidates: Vec<(TangentPair, f64)> = Vec::new();
    let mut bases: Vec<SpherePoint> = ranked.iter().map(|(p, _)| p.clone()).collect();
    for (p, v) in ranked {
        candidates.push((TangentPair::zero(p), v));
    }
    for s in seeds {
        let mut v = s.base.project_tangent(&s.vec);
        clamp_speed(&mut v, vmax);
        let val = eval(&s.base, &v);
        candidates.push((TangentPair { base: s.base.clone(), vec: v }, val));
        bases.push(s.base.clone());
    }
    for p in &bases {
        for _ in 0..BUNDLE_DIRECTIONS {
            let v = random_tangent(p, vmax, &mut rng);
            let val = eval(p, &v);
            candidates.push((TangentPair { base: p.clone(), vec: v }, val));
        }
    }
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut best: Option<(TangentPair, f64)> = None;
    for (start, f_start) in candidates.into_iter().take(BUNDLE_REFINE) {
        let refined = refine_on_bundle(&mut eval, start, f_start, vmax, opts);
        if best.as_ref().is_none_or(|b| refined.1 < b.1) {
            best = Some(refined);
        }
    }
    best.expect("at least one candidate")
}

fn refine_on_bundle<F>(f: &mut F, start: TangentPair, f_start: f64, vmax: f64, opts: &OptOptions) -> (TangentPair, f64)
where
    F: FnMut(&SpherePoint, &[f64]) -> f64,
{
    let k = start.base.dim();
    let (mut center, mut value) = (start, f_start);
    for step in ROUND_STEPS {
        let basis = sphere::tangent_basis(&center.base);
        let chart = |z: &[f64]| {
            let p = SpherePoint::from_unit(sphere::exp_coords(center.base.coords(), &sphere::combine(&basis, &z[..k])));
            let raw: Vec<f64> =
                center.vec.iter().zip(sphere::combine(&basis, &z[k..])).map(|(a, b)| a + b).collect();
            let mut v = p.project_tangent(&raw);
            clamp_speed(&mut v, vmax);
            TangentPair { base: p, vec: v }
        };
        let out = nelder_mead::minimize(
            |z| {
                let tp = chart(z);
                f(&tp.base, &tp.vec)
            },
            &vec![0.0; 2 * k],
            &vec![step; 2 * k],
            opts.settings(2 * k),
        );
        let moved = norm(&out.x);
        let improvement = value - out.fx;
        if out.fx < value {
            center = chart(&out.x);
            value = out.fx;
        }
        if improvement <= opts.tol && moved <= opts.xtol {
            break;
        }
    }
    (center, value)
}

/// Minimizes a scalar function on `[lo, hi]`: 64-point grid, then golden
/// section search around the best grid cell down to 1e-8.
pub fn minimize_scalar<F>(mut f: F, lo: f64, hi: f64, _opts: &OptOptions) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    assert!(lo < hi, "empty interval");
    const GRID: usize = 64;
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let xs: Vec<f64> = (0..GRID).map(|i| lo + (hi - lo) * i as f64 / (GRID - 1) as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| eval(x)).collect();
    let j = (0..GRID).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let (mut a, mut b) = (xs[j.saturating_sub(1)], xs[(j + 1).min(GRID - 1)]);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while b - a > 1e-8 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = eval(x);
    if fx < vals[j] {
        (x, fx)
    } else {
        (xs[j], vals[j])
    }
}

/// Latin-hypercube starts inside `bounds`.
fn stratified_starts<R: Rng>(bounds: &[(f64, f64)], count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut columns: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            let mut strata: Vec<f64> =
                (0..count).map(|s| lo + (hi - lo) * (s as f64 + rng.random::<f64>()) / count as f64).collect();
            // Fisher–Yates
            for i in (1..strata.len()).rev() {
                let j = rng.random_range(0..=i);
                strata.swap(i, j);
            }
            strata
        })
        .collect();
    (0..count).map(|s| columns.iter_mut().map(|c| c[s]).collect()).collect()
}

fn clamp_box(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter().zip(bounds).map(|(v, &(lo, hi))| v.clamp(lo, hi)).collect()
}

/// Multi-start Nelder–Mead over a box: `opts.n_starts` stratified random
/// starts, best result returned.
pub fn minimize_box<F>(f: F, bounds: &[(f64, f64)], opts: &OptOptions) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    minimize_box_from(f, bounds, &[], opts)
}

/// [`minimize_box`] with additional caller-supplied starting points, which
/// are tried before the stratified ones.
pub fn minimize_box_from<F>(mut f: F, bounds: &[(f64, f64)], extra_starts: &[Vec<f64>], opts: &OptOptions) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(bounds.iter().all(|(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi), "bounds must be finite");
    let dims = bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = extra_starts.iter().map(|s| clamp_box(s, bounds)).collect();
    starts.extend(stratified_starts(bounds, opts.n_starts, &mut rng));
    let widths: Vec<f64> = bounds.iter().map(|(lo, hi)| (hi - lo).max(1e-12)).collect();

    let mut boxed = |x: &[f64]| f(&clamp_box(x, bounds));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let mut x = start.clone();
        let mut fx = f64::INFINITY;
        for scale in [0.1, 0.01] {
            let steps: Vec<f64> = widths.iter().map(|w| w * scale).collect();
            let out = nelder_mead::minimize(&mut boxed, &x, &steps, opts.settings(dims));
            let done = fx - out.fx <= opts.tol;
            x = clamp_box(&out.x, bounds);
            fx = out.fx;
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| fx < b.1) {
            best = Some((x, fx));
        }
    }
    best.expect("at least one start")
}

/// Unconstrained Nelder–Mead on `R^d` from `x0`, restarted with shrinking
/// initial simplices. `scale` is the first simplex edge.
pub fn minimize_euclidean<F>(mut f: F, x0: &[f64], scale: f64, opts: &OptOptions) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    for factor in [1.0, 0.1, 0.01, 0.001] {
        let out = nelder_mead::minimize(&mut f, &x, &vec![scale * factor; d], opts.settings(d));
        let moved = x.iter().zip(&out.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let improvement = fx - out.fx;
        if out.fx <= fx {
            x = out.x;
            fx = out.fx;
        }
        if improvement <= opts.tol && moved <= opts.xtol * scale.max(1.0) {
            break;
        }
    }
    (x, fx)
}
