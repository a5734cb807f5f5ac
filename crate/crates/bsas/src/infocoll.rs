//! Information-collection score: a sigmoid of each screen-time deviation
//! from the cohort mean, averaged with feature-importance weights.

use serde::{Deserialize, Serialize};

use crate::error::BsasError;
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanScope {
    /// Means of the slice being scored (e.g. one quarter).
    #[default]
    PerSlice,
    /// Means of the whole game, supplied by the caller.
    Global,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InfoCollConfig {
    /// Divide each deviation by the feature's standard deviation first.
    pub standardize: bool,
    pub means: MeanScope,
}

pub fn sigmoid(y: f64) -> f64 {
    1.0 / (1.0 + (-y).exp())
}

pub fn normalize_importances(x: &[f64]) -> Result<Vec<f64>, BsasError> {
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(BsasError::Param("importances must be finite and >= 0".into()));
    }
    let sum: f64 = x.iter().sum();
    if sum <= 0.0 {
        return Err(BsasError::ZeroImportance);
    }
    Ok(x.iter().map(|v| v / sum).collect())
}

/// `sum_i w_i * sigmoid(y_i - mu_i)` with `w` the normalized importances.
/// With `sd`, deviations are divided by it (zero spread gives deviation 0).
pub fn info_coll(importances: &[f64], y: &[f64], mu: &[f64], sd: Option<&[f64]>) -> Result<f64, BsasError> {
    let n = importances.len();
    if y.len() != n || mu.len() != n || sd.is_some_and(|s| s.len() != n) {
        return Err(BsasError::Features(format!(
            "{n} importances, {} screen times, {} means{}",
            y.len(),
            mu.len(),
            sd.map(|s| format!(", {} deviations", s.len())).unwrap_or_default()
        )));
    }
    normalize_importances(importances)?;
    // dividing once at the end keeps the all-at-mean case at exactly 0.5
    let total: f64 = importances.iter().sum();
    let weighted: f64 = (0..n)
        .map(|i| {
            let mut dev = y[i] - mu[i];
            if let Some(sd) = sd {
                dev = if sd[i] > 0.0 { dev / sd[i] } else { 0.0 };
            }
            importances[i] * sigmoid(dev)
        })
        .sum();
    Ok(weighted / total)
}

/// Scores every team in `m`. `global_means` is required for
/// [`MeanScope::Global`] and ignored otherwise.
pub fn info_coll_cohort(
    m: &FeatureMatrix,
    importances: &[f64],
    cfg: &InfoCollConfig,
    global_means: Option<&[f64]>,
) -> Result<Vec<(String, f64)>, BsasError> {
    let local = m.column_means();
    let mu = match cfg.means {
        MeanScope::PerSlice => local.as_slice(),
        MeanScope::Global => global_means.ok_or_else(|| BsasError::Param("global means not supplied".into()))?,
    };
    let sds = cfg.standardize.then(|| m.column_sds());
    m.teams
        .iter()
        .zip(&m.rows)
        .map(|(t, row)| Ok((t.clone(), info_coll(importances, row, mu, sds.as_deref())?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_the_mean() {
        assert_eq!(info_coll(&[3.0, 1.0, 2.0], &[4.0, 5.0, 6.0], &[4.0, 5.0, 6.0], None).unwrap(), 0.5);
    }

    #[test]
    fn limits() {
        let v = info_coll(&[0.75, 0.25], &[1.0, f64::INFINITY], &[1.0, 0.0], None).unwrap();
        assert_eq!(v, 0.625);
        assert_eq!(info_coll(&[1.0, 1.0], &[f64::NEG_INFINITY; 2], &[0.0; 2], None).unwrap(), 0.0);
    }

    #[test]
    fn standardized() {
        let v = info_coll(&[1.0], &[12.0], &[10.0], Some(&[2.0])).unwrap();
        assert!((v - sigmoid(1.0)).abs() < 1e-15);
        assert_eq!(info_coll(&[1.0], &[12.0], &[10.0], Some(&[0.0])).unwrap(), 0.5);
    }

    #[test]
    fn misaligned_or_zero() {
        assert!(matches!(info_coll(&[1.0], &[1.0, 2.0], &[1.0], None), Err(BsasError::Features(_))));
        assert_eq!(info_coll(&[0.0], &[1.0], &[1.0], None), Err(BsasError::ZeroImportance));
    }

    #[test]
    fn cohort_means() {
        let m = FeatureMatrix::new(vec!["a".into(), "b".into()], vec!["x".into()], vec![vec![1.0], vec![3.0]]).unwrap();
        let s = info_coll_cohort(&m, &[1.0], &InfoCollConfig::default(), None).unwrap();
        assert!((s[0].1 - sigmoid(-1.0)).abs() < 1e-15);
        let g = InfoCollConfig { means: MeanScope::Global, ..Default::default() };
        assert!(info_coll_cohort(&m, &[1.0], &g, None).is_err());
        let s = info_coll_cohort(&m, &[1.0], &g, Some(&[3.0])).unwrap();
        assert_eq!(s[1].1, 0.5);
    }
}
