//! Plain Nelder–Mead simplex search with the standard coefficients
//! (reflection 1, expansion 2, contraction 1/2, shrink 1/2).

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub max_iter: usize,
    /// Spread of function values across the simplex.
    pub ftol: f64,
    /// Largest coordinate distance of any vertex from the best vertex.
    pub xtol: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iters: usize,
    pub evals: usize,
}

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimizes `f` starting from `x0` with an axis-aligned initial simplex of
/// edge lengths `steps`.
///
/// The starting point is a vertex of the initial simplex, so the returned
/// value never exceeds `f(x0)`.
pub fn minimize<F>(mut f: F, x0: &[f64], steps: &[f64], settings: Settings) -> Outcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(steps.len(), n);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(f(x))
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(eval(x0, &mut evals));
    if n == 0 {
        return Outcome { x: x0.to_vec(), fx: values[0], iters: 0, evals };
    }
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        values.push(eval(&v, &mut evals));
        simplex.push(v);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut iters = 0;

    while iters < settings.max_iter {
        // Stable sort keeps the original start first among ties.
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];

        let spread = values[worst] - values[best];
        let size = simplex
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if (spread <= settings.ftol || !spread.is_finite() && size == 0.0) && size <= settings.xtol {
            break;
        }
        iters += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / n as f64;
            }
        }

        for j in 0..n {
            trial[j] = centroid[j] + ALPHA * (centroid[j] - simplex[worst][j]);
        }
        let f_r = eval(&trial, &mut evals);

        if f_r < values[best] {
            for j in 0..n {
                trial2[j] = centroid[j] + GAMMA * (trial[j] - centroid[j]);
            }
            let f_e = eval(&trial2, &mut evals);
            if f_e < f_r {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_e;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_r;
            continue;
        }
        // Contraction, outside or inside.
        let outside = f_r < values[worst];
        for j in 0..n {
            trial2[j] = if outside {
                centroid[j] + RHO * (trial[j] - centroid[j])
            } else {
                centroid[j] + RHO * (simplex[worst][j] - centroid[j])
            };
        }
        let f_c = eval(&trial2, &mut evals);
        let accept = if outside { f_c <= f_r } else { f_c < values[worst] };
        if accept {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_c;
            continue;
        }
        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                *x = a + SIGMA * (*x - a);
            }
            values[i] = eval(&simplex[i], &mut evals);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    Outcome { x: simplex[best].clone(), fx: values[best], iters, evals }
}
