//! Seeded synthetic screen-time cohorts with a known informative feature.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::binning::equal_frequency_bin;
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCohort {
    pub features: FeatureMatrix,
    /// Latent performance before binning.
    pub performance: Vec<f64>,
    pub labels: Vec<usize>,
}

/// `n` teams with `p` exponential screen-time features (mean 60 s).
/// Performance is column 0 plus Gaussian noise with standard deviation
/// `noise` times that column's spread; labels are its `k` equal-frequency bins.
pub fn screen_time_cohort(n: usize, p: usize, k: usize, noise: f64, seed: u64) -> SyntheticCohort {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let time = Exp::new(1.0 / 60.0).expect("positive rate");
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| time.sample(&mut rng)).collect()).collect();
    let jitter = Normal::new(0.0, noise.max(0.0) * 60.0).expect("finite sd");
    let performance: Vec<f64> = rows.iter().map(|r| r[0] + jitter.sample(&mut rng)).collect();
    let (_, labels) = equal_frequency_bin(&performance, k).expect("n >= k");
    let teams = (0..n).map(|i| format!("team{i:03}")).collect();
    let names = (0..p).map(|j| format!("screen{j:02}")).collect();
    SyntheticCohort { features: FeatureMatrix::new(teams, names, rows).expect("valid synthetic matrix"), performance, labels }
}
