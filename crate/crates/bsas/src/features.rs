use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use teamtrace_core::model::{EventBody, RawEvent};

use crate::error::BsasError;

/// Seconds each team spent on each screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub teams: Vec<String>,
    pub features: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(teams: Vec<String>, features: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, BsasError> {
        if rows.len() != teams.len() {
            return Err(BsasError::Format(format!("{} teams but {} rows", teams.len(), rows.len())));
        }
        for (t, r) in teams.iter().zip(&rows) {
            if r.len() != features.len() {
                return Err(BsasError::Format(format!("team {t}: {} cells for {} features", r.len(), features.len())));
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(BsasError::Format(format!("team {t}: screen time {v} must be finite and >= 0")));
            }
        }
        let distinct: BTreeSet<&String> = teams.iter().collect();
        if distinct.len() != teams.len() {
            return Err(BsasError::Format("duplicate team id".into()));
        }
        Ok(FeatureMatrix { teams, features, rows })
    }

    /// Sums `duration_s` of screen views per team. Columns are the sorted
    /// screen ids seen, unless `screens` fixes them (other screens are
    /// dropped, missing ones are zero).
    pub fn from_events(events: &[RawEvent], screens: Option<&[String]>) -> Self {
        let mut time: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for e in events {
            let row = time.entry(e.team_id()).or_default();
            if let EventBody::ScreenView { screen_id, duration_s } = e.body() {
                seen.insert(screen_id);
                *row.entry(screen_id).or_default() += duration_s;
            }
        }
        let features: Vec<String> = match screens {
            Some(s) => s.to_vec(),
            None => seen.into_iter().map(String::from).collect(),
        };
        let teams: Vec<String> = time.keys().map(|t| t.to_string()).collect();
        let rows = time
            .values()
            .map(|row| features.iter().map(|f| row.get(f.as_str()).copied().unwrap_or(0.0)).collect())
            .collect();
        FeatureMatrix { teams, features, rows }
    }

    /// Reads `team_id,<screen>,...`; empty cells are zero.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, BsasError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("team_id") {
            return Err(BsasError::Format("first column must be team_id".into()));
        }
        let features: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut teams = Vec::new();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            teams.push(rec[0].to_string());
            let row = rec
                .iter()
                .skip(1)
                .map(|c| if c.is_empty() { Ok(0.0) } else { c.parse::<f64>() })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| BsasError::Format(format!("row {}: {e}", i + 2)))?;
            rows.push(row);
        }
        Self::new(teams, features, rows)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["team_id".to_string()];
        header.extend(self.features.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (t, r) in self.teams.iter().zip(&self.rows) {
            let mut rec = vec![t.clone()];
            rec.extend(r.iter().map(f64::to_string));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.rows.len().max(1) as f64;
        (0..self.features.len()).map(|j| self.rows.iter().map(|r| r[j]).sum::<f64>() / n).collect()
    }

    /// Population standard deviation per column.
    pub fn column_sds(&self) -> Vec<f64> {
        let n = self.rows.len().max(1) as f64;
        self.column_means()
            .iter()
            .enumerate()
            .map(|(j, m)| (self.rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n).sqrt())
            .collect()
    }

    /// Keeps only `teams`, in that order.
    pub fn select(&self, teams: &[String]) -> Result<Self, BsasError> {
        let rows = teams
            .iter()
            .map(|t| {
                let i = self.teams.iter().position(|x| x == t).ok_or_else(|| BsasError::Format(format!("unknown team {t}")))?;
                Ok(self.rows[i].clone())
            })
            .collect::<Result<_, BsasError>>()?;
        Ok(FeatureMatrix { teams: teams.to_vec(), features: self.features.clone(), rows })
    }
}

/// Splits a log into quarters per team. Events up to and including a
/// team's `quarter_decision` for quarter `q` belong to `q`; later events
/// belong to the next quarter.
pub fn quarter_slices(events: &[RawEvent]) -> BTreeMap<u8, Vec<RawEvent>> {
    let mut by_team: BTreeMap<&str, Vec<&RawEvent>> = BTreeMap::new();
    for e in events {
        by_team.entry(e.team_id()).or_default().push(e);
    }
    let mut out: BTreeMap<u8, Vec<RawEvent>> = BTreeMap::new();
    for evs in by_team.values_mut() {
        evs.sort_by_key(|e| e.ts());
        let mut q = 1u8;
        for e in evs.iter() {
            out.entry(q).or_default().push((*e).clone());
            if let EventBody::QuarterDecision { quarter } = e.body() {
                q = quarter.saturating_add(1);
            }
        }
    }
    out
}
