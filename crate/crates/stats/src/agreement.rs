use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::StatsError;

/// Rater counts per item (rows) and category (columns). Every row sums to
/// the same number of raters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingTable {
    pub categories: Vec<String>,
    pub counts: Vec<Vec<u32>>,
}

impl RatingTable {
    pub fn new(categories: Vec<String>, counts: Vec<Vec<u32>>) -> Result<Self, StatsError> {
        let k = categories.len();
        if counts.iter().any(|r| r.len() != k) {
            return Err(StatsError::Shape(format!("every item needs {k} category counts")));
        }
        let raters = counts.first().map_or(0, |r| r.iter().sum::<u32>());
        if let Some(i) = counts.iter().position(|r| r.iter().sum::<u32>() != raters) {
            return Err(StatsError::Shape(format!("item {i} has a different rater count than item 0 ({raters})")));
        }
        Ok(RatingTable { categories, counts })
    }

    /// Builds the table from one category label per rater per item.
    pub fn from_labels(labels: &[Vec<&str>]) -> Result<Self, StatsError> {
        let mut categories: Vec<String> = labels.iter().flatten().map(|s| s.to_string()).collect();
        categories.sort();
        categories.dedup();
        let counts = labels
            .iter()
            .map(|item| {
                categories.iter().map(|c| item.iter().filter(|l| **l == c.as_str()).count() as u32).collect()
            })
            .collect();
        Self::new(categories, counts)
    }

    /// Reads `item,<category>,...` with integer counts.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, StatsError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let categories: Vec<String> = rdr.headers()?.iter().skip(1).map(String::from).collect();
        let mut counts = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .skip(1)
                .map(str::parse::<u32>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| StatsError::Format(format!("row {}: {e}", i + 2)))?;
            counts.push(row);
        }
        Self::new(categories, counts)
    }

    pub fn raters(&self) -> u32 {
        self.counts.first().map_or(0, |r| r.iter().sum())
    }
}

/// Fleiss' kappa. `Ok(None)` when expected agreement is 1 (every rating
/// in a single category), where kappa is undefined.
pub fn fleiss_kappa(t: &RatingTable) -> Result<Option<f64>, StatsError> {
    let n = t.raters() as f64;
    if n < 2.0 {
        return Err(StatsError::TooFew { what: "raters per item", need: 2, got: n as usize });
    }
    let items = t.counts.len() as f64;
    if items == 0.0 {
        return Err(StatsError::TooFew { what: "items", need: 1, got: 0 });
    }
    let p_bar = t
        .counts
        .iter()
        .map(|r| (r.iter().map(|&c| (c as f64).powi(2)).sum::<f64>() - n) / (n * (n - 1.0)))
        .sum::<f64>()
        / items;
    let pe: f64 = (0..t.categories.len())
        .map(|j| {
            let p = t.counts.iter().map(|r| r[j] as f64).sum::<f64>() / (items * n);
            p * p
        })
        .sum();
    if (1.0 - pe).abs() < 1e-15 {
        return Ok(None);
    }
    Ok(Some((p_bar - pe) / (1.0 - pe)))
}
