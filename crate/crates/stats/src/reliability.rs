//! Internal-consistency reliability.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alpha {
    pub alpha: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub respondents: usize,
    pub items: usize,
}

pub(crate) fn sample_variance(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    let mean = v.clone().sum::<f64>() / n;
    v.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, StatsError> {
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) {
        return Err(StatsError::Shape("respondents answered different item counts".into()));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite("responses"));
    }
    Ok(k)
}

/// Cronbach's alpha of `rows` (one row per respondent, one column per
/// item) with a Feldt confidence interval at level `confidence`.
pub fn cronbach_alpha(rows: &[Vec<f64>], confidence: f64) -> Result<Alpha, StatsError> {
    let k = check_rows(rows)?;
    let n = rows.len();
    if k < 2 {
        return Err(StatsError::TooFew { what: "items", need: 2, got: k });
    }
    if n < 3 {
        return Err(StatsError::TooFew { what: "respondents", need: 3, got: n });
    }
    if !(0.0 < confidence && confidence < 1.0) {
        return Err(StatsError::Param(format!("confidence {confidence} must be in (0, 1)")));
    }
    let item_var: f64 = (0..k).map(|j| sample_variance(rows.iter().map(move |r| r[j]))).sum();
    let total_var = sample_variance(rows.iter().map(|r| r.iter().sum::<f64>()));
    if total_var <= 0.0 {
        return Err(StatsError::ZeroVariance("total score".into()));
    }
    let kf = k as f64;
    let alpha = kf / (kf - 1.0) * (1.0 - item_var / total_var);

    let df1 = (n - 1) as f64;
    let df2 = df1 * (kf - 1.0);
    let f = FisherSnedecor::new(df1, df2).map_err(|e| StatsError::Param(e.to_string()))?;
    let tail = (1.0 - confidence) / 2.0;
    let ci_low = 1.0 - (1.0 - alpha) * f.inverse_cdf(1.0 - tail);
    let ci_high = 1.0 - (1.0 - alpha) * f.inverse_cdf(tail);
    Ok(Alpha { alpha, ci_low, ci_high, confidence, respondents: n, items: k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaComparison {
    /// `(1 - alpha_1) / (1 - alpha_2)`
    pub w: f64,
    pub df1: f64,
    pub df2: f64,
    pub p_value: f64,
}

/// Feldt's test for two alphas from independent samples of sizes `n1`
/// and `n2`. Two-sided.
pub fn compare_alphas(alpha1: f64, n1: usize, alpha2: f64, n2: usize) -> Result<AlphaComparison, StatsError> {
    if n1 < 2 || n2 < 2 {
        return Err(StatsError::TooFew { what: "respondents per sample", need: 2, got: n1.min(n2) });
    }
    if alpha1 >= 1.0 || alpha2 >= 1.0 {
        return Err(StatsError::Param("alpha must be below 1".into()));
    }
    let w = (1.0 - alpha1) / (1.0 - alpha2);
    let (df1, df2) = ((n1 - 1) as f64, (n2 - 1) as f64);
    let f = FisherSnedecor::new(df1, df2).map_err(|e| StatsError::Param(e.to_string()))?;
    let p_value = (2.0 * f.cdf(w).min(f.sf(w))).min(1.0);
    Ok(AlphaComparison { w, df1, df2, p_value })
}
