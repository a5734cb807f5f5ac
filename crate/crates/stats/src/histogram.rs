use serde::{Deserialize, Serialize};

use crate::error::StatsError;

pub const LIKERT_MIN: u8 = 1;
pub const LIKERT_MAX: u8 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertSummary {
    /// `counts[v - 1]` responses with value `v`.
    pub counts: [u32; 5],
    /// All most frequent values, ascending.
    pub modes: Vec<u8>,
    pub mean: Option<f64>,
}

pub fn likert_summary(values: impl IntoIterator<Item = u8>) -> Result<LikertSummary, StatsError> {
    let mut counts = [0u32; 5];
    for (i, v) in values.into_iter().enumerate() {
        if !(LIKERT_MIN..=LIKERT_MAX).contains(&v) {
            return Err(StatsError::OutOfRange {
                value: v.into(),
                lo: LIKERT_MIN.into(),
                hi: LIKERT_MAX.into(),
                at: format!("response {i}"),
            });
        }
        counts[usize::from(v - 1)] += 1;
    }
    let total: u32 = counts.iter().sum();
    let top = counts.iter().copied().max().unwrap_or(0);
    let modes = if total == 0 { Vec::new() } else { (1..=5).filter(|v| counts[usize::from(v - 1)] == top).collect() };
    let mean = (total > 0).then(|| {
        counts.iter().zip(1..).map(|(&c, v)| f64::from(c) * f64::from(v)).sum::<f64>() / f64::from(total)
    });
    Ok(LikertSummary { counts, modes, mean })
}
