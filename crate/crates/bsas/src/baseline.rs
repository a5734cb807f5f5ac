//! Macro-F1 of a stratified random classifier, the reference a trained
//! model has to beat.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::metrics::macro_f1;

fn class_counts(y: &[usize], n_classes: usize) -> Vec<usize> {
    let mut c = vec![0; n_classes];
    for &k in y {
        c[k] += 1;
    }
    c
}

/// Large-sample expectation. A classifier guessing class `k` with
/// probability `p_k` has precision and recall `p_k` for that class, so the
/// macro average is the mean of the `p_k` over classes that occur.
pub fn dummy_baseline_analytic(y: &[usize], n_classes: usize) -> f64 {
    let counts = class_counts(y, n_classes);
    let n = y.len() as f64;
    if n == 0.0 {
        return 0.0;
    }
    counts.iter().map(|&c| c as f64 / n).sum::<f64>() / n_classes as f64
}

/// Monte-Carlo estimate over at least `draws` individual predictions,
/// simulated in whole passes over `y`.
pub fn dummy_baseline_mc(y: &[usize], n_classes: usize, draws: usize, seed: u64) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let counts = class_counts(y, n_classes);
    let Ok(dist) = WeightedIndex::new(&counts) else {
        return 0.0;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rounds = draws.div_ceil(y.len()).max(1);
    let mut total = 0.0;
    let mut pred = vec![0; y.len()];
    for _ in 0..rounds {
        pred.iter_mut().for_each(|p| *p = dist.sample(&mut rng));
        total += macro_f1(y, &pred, n_classes);
    }
    total / rounds as f64
}
