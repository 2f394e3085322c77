//! Fixtures shared by the benchmarks.

use manifold_regress::sampling::{generate_dataset, replication_rng, sd_to_contraction};
use manifold_regress::{CurveModel, Dataset};

/// Noisy sample of `curve` with noise level `sd`, reproducible from `seed`.
pub fn dataset(curve: &CurveModel, n: usize, sd: f64, seed: u64) -> Dataset {
    let mut rng = replication_rng(seed, 0);
    let a = sd_to_contraction(sd).expect("valid sd");
    generate_dataset(curve, n, a, (0.0, 1.0), &mut rng).expect("valid dataset")
}
