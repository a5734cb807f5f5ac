use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::StatsError;
use crate::histogram::{LIKERT_MAX, LIKERT_MIN};

/// Likert responses, one row per respondent. Missing cells are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyMatrix {
    pub respondents: Vec<String>,
    pub items: Vec<String>,
    pub cells: Vec<Vec<Option<u8>>>,
    /// Item label to factor code.
    #[serde(default)]
    pub factors: BTreeMap<String, String>,
}

impl SurveyMatrix {
    pub fn new(respondents: Vec<String>, items: Vec<String>, cells: Vec<Vec<Option<u8>>>) -> Result<Self, StatsError> {
        if cells.len() != respondents.len() {
            return Err(StatsError::Shape(format!("{} respondents, {} rows", respondents.len(), cells.len())));
        }
        for (r, row) in cells.iter().enumerate() {
            if row.len() != items.len() {
                return Err(StatsError::Shape(format!("row {r} has {} cells, expected {}", row.len(), items.len())));
            }
            for (c, v) in row.iter().enumerate() {
                if let Some(v) = *v {
                    if !(LIKERT_MIN..=LIKERT_MAX).contains(&v) {
                        return Err(StatsError::OutOfRange {
                            value: v.into(),
                            lo: LIKERT_MIN.into(),
                            hi: LIKERT_MAX.into(),
                            at: format!("{} / {}", respondents[r], items[c]),
                        });
                    }
                }
            }
        }
        Ok(SurveyMatrix { respondents, items, cells, factors: BTreeMap::new() })
    }

    /// Reads `respondent,<item>,...`; an empty cell is missing.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, StatsError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let items: Vec<String> = rdr.headers()?.iter().skip(1).map(String::from).collect();
        let mut respondents = Vec::new();
        let mut cells = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            respondents.push(rec.get(0).unwrap_or_default().to_string());
            let row = rec
                .iter()
                .skip(1)
                .map(|s| {
                    if s.is_empty() {
                        Ok(None)
                    } else {
                        s.parse::<u8>().map(Some).map_err(|_| StatsError::Format(format!("line {line}: bad response {s:?}")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            cells.push(row);
        }
        Self::new(respondents, items, cells)
    }

    pub fn with_factors(mut self, factors: BTreeMap<String, String>) -> Self {
        self.factors = factors;
        self
    }

    pub fn missing_cells(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_none()).count()
    }

    pub fn item_index(&self, label: &str) -> Option<usize> {
        self.items.iter().position(|i| i == label)
    }

    pub fn items_of_factor(&self, factor: &str) -> Vec<String> {
        self.items.iter().filter(|i| self.factors.get(*i).is_some_and(|f| f == factor)).cloned().collect()
    }

    /// Rows complete on `items`, as floats in the order given.
    pub fn complete_rows(&self, items: &[String]) -> Result<Vec<Vec<f64>>, StatsError> {
        let cols = items
            .iter()
            .map(|l| self.item_index(l).ok_or_else(|| StatsError::Param(format!("unknown item {l}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .cells
            .iter()
            .filter_map(|row| cols.iter().map(|&c| row[c].map(f64::from)).collect::<Option<Vec<f64>>>())
            .collect())
    }

    /// Non-missing responses to one item.
    pub fn column(&self, label: &str) -> Result<Vec<u8>, StatsError> {
        let c = self.item_index(label).ok_or_else(|| StatsError::Param(format!("unknown item {label}")))?;
        Ok(self.cells.iter().filter_map(|r| r[c]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_missing() {
        let m = SurveyMatrix::from_csv("respondent,a,b,c\np1,1,2,3\np2,,4,5\np3,5,5,1\n".as_bytes()).unwrap();
        assert_eq!(m.missing_cells(), 1);
        let all = m.complete_rows(&m.items.clone()).unwrap();
        assert_eq!(all.len(), 2);
        let bc = m.complete_rows(&["c".into(), "b".into()]).unwrap();
        assert_eq!(bc, [vec![3.0, 2.0], vec![5.0, 4.0], vec![1.0, 5.0]]);
        assert_eq!(m.column("a").unwrap(), [1, 5]);
    }

    #[test]
    fn rejects_out_of_scale() {
        assert!(matches!(
            SurveyMatrix::from_csv("respondent,a\np1,6\n".as_bytes()),
            Err(StatsError::OutOfRange { value: 6, .. })
        ));
        assert!(SurveyMatrix::from_csv("respondent,a\np1,x\n".as_bytes()).is_err());
    }
}
