//! Rank-based equal-frequency discretization.

use serde::{Deserialize, Serialize};

use crate::error::BsasError;

/// Names for the default five classes, lowest values first.
pub const FIVE_CLASS_NAMES: [&str; 5] = ["very_low", "low", "medium", "high", "very_high"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassBins {
    pub k: usize,
    pub names: Vec<String>,
    /// Largest value placed in each of the first `k - 1` bins.
    pub boundaries: Vec<f64>,
    pub sizes: Vec<usize>,
}

impl ClassBins {
    pub fn name(&self, class: usize) -> &str {
        &self.names[class]
    }
}

pub fn class_names(k: usize) -> Vec<String> {
    if k == 5 {
        FIVE_CLASS_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..k).map(|i| format!("class_{i}")).collect()
    }
}

/// Splits `values` into `k` bins of near-equal population by rank. Ties
/// are broken by input order, so equal values may land in different bins.
/// Returns the bins and one class index per input value (0 = lowest).
pub fn equal_frequency_bin(values: &[f64], k: usize) -> Result<(ClassBins, Vec<usize>), BsasError> {
    if k == 0 {
        return Err(BsasError::Param("k must be >= 1".into()));
    }
    if values.len() < k {
        return Err(BsasError::TooFewValues { need: k, k, got: values.len() });
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(BsasError::Param("values must not be NaN".into()));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut labels = vec![0; n];
    let mut sizes = vec![0; k];
    let mut boundaries = vec![f64::NEG_INFINITY; k - 1];
    for (rank, &i) in order.iter().enumerate() {
        let class = rank * k / n;
        labels[i] = class;
        sizes[class] += 1;
        if class + 1 < k {
            boundaries[class] = values[i];
        }
    }
    Ok((ClassBins { k, names: class_names(k), boundaries, sizes }, labels))
}
