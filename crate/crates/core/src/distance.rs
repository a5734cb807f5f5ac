//! Sequence distances.
//!
//! MPL sequences all have one state per quarter, so they are compared
//! position by position. Daedalus sequences vary in length and are aligned
//! with dynamic time warping, then adjusted by domain penalty terms.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DistanceError, FormatError};
use crate::states::{DaedalusState, MplState, Sequence, TraceSequence};

/// Penalty weights for the MPL state difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MplWeights {
    pub target_decrease: f64,
    pub target_other: f64,
    pub nontarget_decrease: f64,
    pub nontarget_other: f64,
}

impl Default for MplWeights {
    fn default() -> Self {
        MplWeights { target_decrease: 10.0, target_other: 4.0, nontarget_decrease: 5.0, nontarget_other: 2.0 }
    }
}

impl MplWeights {
    fn fields(&self) -> [(&'static str, f64); 4] {
        [
            ("target_decrease", self.target_decrease),
            ("target_other", self.target_other),
            ("nontarget_decrease", self.nontarget_decrease),
            ("nontarget_other", self.nontarget_other),
        ]
    }

    /// Soft checks: a decrease weight below its counterpart inverts the
    /// intended emphasis on failures.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.target_decrease < self.target_other {
            w.push("mpl.target_decrease < mpl.target_other".to_string());
        }
        if self.nontarget_decrease < self.nontarget_other {
            w.push("mpl.nontarget_decrease < mpl.nontarget_other".to_string());
        }
        w
    }

    pub fn scaled(&self, c: f64) -> Self {
        MplWeights {
            target_decrease: self.target_decrease * c,
            target_other: self.target_other * c,
            nontarget_decrease: self.nontarget_decrease * c,
            nontarget_other: self.nontarget_other * c,
        }
    }
}

/// DTW mismatch cost and additive penalty weights for Daedalus traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DaedalusPenalties {
    pub base_mismatch: f64,
    pub solved_mismatch: f64,
    pub final_puzzle_extra: f64,
    pub gave_up_disparity: f64,
    pub gave_up_without_trying: f64,
    pub failed_once: f64,
    pub failed_many_times: f64,
    pub irrelevant_cue: f64,
    /// Per puzzle of solved-count difference, applied when either side gave up.
    pub earliness_weight: f64,
    pub final_puzzle: String,
}

impl Default for DaedalusPenalties {
    fn default() -> Self {
        DaedalusPenalties {
            base_mismatch: 1.0,
            solved_mismatch: 1.0,
            final_puzzle_extra: 1.0,
            gave_up_disparity: 300.0,
            gave_up_without_trying: 400.0,
            failed_once: 1.0,
            failed_many_times: 3.0,
            irrelevant_cue: 2.0,
            earliness_weight: 10.0,
            final_puzzle: "safe".to_string(),
        }
    }
}

impl DaedalusPenalties {
    fn fields(&self) -> [(&'static str, f64); 9] {
        [
            ("base_mismatch", self.base_mismatch),
            ("solved_mismatch", self.solved_mismatch),
            ("final_puzzle_extra", self.final_puzzle_extra),
            ("gave_up_disparity", self.gave_up_disparity),
            ("gave_up_without_trying", self.gave_up_without_trying),
            ("failed_once", self.failed_once),
            ("failed_many_times", self.failed_many_times),
            ("irrelevant_cue", self.irrelevant_cue),
            ("earliness_weight", self.earliness_weight),
        ]
    }

    fn fields_mut(&mut self) -> [&mut f64; 9] {
        [
            &mut self.base_mismatch,
            &mut self.solved_mismatch,
            &mut self.final_puzzle_extra,
            &mut self.gave_up_disparity,
            &mut self.gave_up_without_trying,
            &mut self.failed_once,
            &mut self.failed_many_times,
            &mut self.irrelevant_cue,
            &mut self.earliness_weight,
        ]
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for f in out.fields_mut() {
            *f *= c;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Mpl,
    #[default]
    Daedalus,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Mpl => "mpl",
            MetricKind::Daedalus => "daedalus",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mpl" => Ok(MetricKind::Mpl),
            "daedalus" => Ok(MetricKind::Daedalus),
            _ => Err(format!("unknown metric {s:?} (expected mpl or daedalus)")),
        }
    }
}

/// Everything needed to compute a distance matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceConfig {
    pub metric: MetricKind,
    pub mpl: MplWeights,
    pub daedalus: DaedalusPenalties,
}

/// A rejected config field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl DistanceConfig {
    pub fn mpl() -> Self {
        DistanceConfig { metric: MetricKind::Mpl, ..Default::default() }
    }

    pub fn daedalus() -> Self {
        DistanceConfig { metric: MetricKind::Daedalus, ..Default::default() }
    }

    /// Every weight must be finite and non-negative.
    pub fn validate(&self) -> Result<(), Vec<FieldError>> {
        let mpl = self.mpl.fields().into_iter().map(|(k, v)| (format!("mpl.{k}"), v));
        let dae = self.daedalus.fields().into_iter().map(|(k, v)| (format!("daedalus.{k}"), v));
        let mut errors: Vec<FieldError> = mpl
            .chain(dae)
            .filter(|(_, v)| !v.is_finite() || *v < 0.0)
            .map(|(field, v)| FieldError { field, message: format!("must be a non-negative finite number, got {v}") })
            .collect();
        if self.daedalus.final_puzzle.is_empty() {
            errors.push(FieldError { field: "daedalus.final_puzzle".into(), message: "must not be empty".into() });
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    /// Parses a JSON document and validates it, reporting problems per field.
    pub fn from_json_checked(body: &str) -> Result<Self, Vec<FieldError>> {
        let cfg: DistanceConfig = serde_json::from_str(body)
            .map_err(|e| vec![FieldError { field: "<body>".into(), message: e.to_string() }])?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Multiplies every weight by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        DistanceConfig { metric: self.metric, mpl: self.mpl.scaled(c), daedalus: self.daedalus.scaled(c) }
    }
}

/// Difference between two MPL states.
pub fn mpl_state_diff(a: &MplState, b: &MplState, w: &MplWeights) -> f64 {
    let mut d = 0.0;
    if a.target != b.target {
        d += if a.target.has_decrease() || b.target.has_decrease() { w.target_decrease } else { w.target_other };
    }
    if a.non_target != b.non_target {
        d += if a.non_target.has_decrease() || b.non_target.has_decrease() {
            w.nontarget_decrease
        } else {
            w.nontarget_other
        };
    }
    d
}

/// Sum of per-quarter state differences of two equally long sequences.
pub fn mpl_sequence_distance(s1: &[MplState], s2: &[MplState], w: &MplWeights) -> Result<f64, DistanceError> {
    if s1.len() != s2.len() {
        return Err(DistanceError::LengthMismatch { left: s1.len(), right: s2.len() });
    }
    Ok(s1.iter().zip(s2).map(|(a, b)| mpl_state_diff(a, b, w)).sum())
}

/// Minimum number of label mismatches over all monotone warping paths.
/// An empty side leaves every state of the other unmatched.
pub fn dtw_mismatches<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return a.len().max(b.len());
    }
    let m = b.len();
    let mut prev = vec![usize::MAX; m];
    let mut cur = vec![0usize; m];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let cost = usize::from(x != y);
            let best = match (i, j) {
                (0, 0) => 0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(cur[j - 1]).min(prev[j - 1]),
            };
            cur[j] = best + cost;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Per-term contributions of a Daedalus distance. Counts are kept separate
/// from weights so every term can be audited.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DaedalusBreakdown {
    pub dtw_mismatches: usize,
    pub solved_mismatches: usize,
    pub final_mismatch: bool,
    pub gave_up_disparity: bool,
    pub without_trying_disparity: bool,
    /// |k1 - k2| of solved counts, 0 unless one side gave up.
    pub earliness_gap: usize,
    pub failed_once_gap: usize,
    pub failed_many_gap: usize,
    pub irrelevant_gap: usize,
}

impl DaedalusBreakdown {
    pub fn total(&self, p: &DaedalusPenalties) -> f64 {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        p.base_mismatch * self.dtw_mismatches as f64
            + p.solved_mismatch * self.solved_mismatches as f64
            + p.final_puzzle_extra * flag(self.final_mismatch)
            + p.gave_up_disparity * flag(self.gave_up_disparity)
            + p.gave_up_without_trying * flag(self.without_trying_disparity)
            + p.earliness_weight * self.earliness_gap as f64
            + p.failed_once * self.failed_once_gap as f64
            + p.failed_many_times * self.failed_many_gap as f64
            + p.irrelevant_cue * self.irrelevant_gap as f64
    }
}

fn count(s: &[DaedalusState], target: &DaedalusState) -> usize {
    s.iter().filter(|x| *x == target).count()
}

pub fn daedalus_breakdown(s1: &[DaedalusState], s2: &[DaedalusState], final_puzzle: &str) -> DaedalusBreakdown {
    let solved = |s: &[DaedalusState]| -> BTreeSet<String> {
        s.iter()
            .filter_map(|x| match x {
                DaedalusState::Solved(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    };
    let (sv1, sv2) = (solved(s1), solved(s2));
    let only_one: Vec<&String> = sv1.symmetric_difference(&sv2).collect();
    let gave1 = s1.iter().any(DaedalusState::is_gave_up);
    let gave2 = s2.iter().any(DaedalusState::is_gave_up);
    let wt1 = s1.contains(&DaedalusState::GaveUpWithoutTrying);
    let wt2 = s2.contains(&DaedalusState::GaveUpWithoutTrying);
    let solves = |s: &[DaedalusState]| s.iter().filter(|x| matches!(x, DaedalusState::Solved(_))).count();
    let gap = |t: DaedalusState| count(s1, &t).abs_diff(count(s2, &t));
    DaedalusBreakdown {
        dtw_mismatches: dtw_mismatches(s1, s2),
        solved_mismatches: only_one.len(),
        final_mismatch: only_one.iter().any(|p| *p == final_puzzle),
        gave_up_disparity: gave1 != gave2,
        without_trying_disparity: wt1 != wt2,
        earliness_gap: if gave1 || gave2 { solves(s1).abs_diff(solves(s2)) } else { 0 },
        failed_once_gap: gap(DaedalusState::FailedOnce),
        failed_many_gap: gap(DaedalusState::FailedManyTimes),
        irrelevant_gap: gap(DaedalusState::IrrelevantCue),
    }
}

/// DTW over label equality plus the domain penalty terms.
pub fn daedalus_distance(s1: &[DaedalusState], s2: &[DaedalusState], p: &DaedalusPenalties) -> f64 {
    daedalus_breakdown(s1, s2, &p.final_puzzle).total(p)
}

/// Distance between two sequences under the configured metric.
pub fn distance(a: &Sequence, b: &Sequence, cfg: &DistanceConfig) -> Result<f64, DistanceError> {
    match (cfg.metric, a, b) {
        (MetricKind::Mpl, Sequence::Mpl(x), Sequence::Mpl(y)) => mpl_sequence_distance(x, y, &cfg.mpl),
        (MetricKind::Daedalus, Sequence::Daedalus(x), Sequence::Daedalus(y)) => {
            Ok(daedalus_distance(x, y, &cfg.daedalus))
        }
        (m, x, y) => {
            let found = if x.kind_name() != m.as_str() { x.kind_name() } else { y.kind_name() };
            Err(DistanceError::WrongKind { metric: m.as_str(), found })
        }
    }
}

/// Symmetric matrix with zero diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn zeros(labels: Vec<String>) -> Self {
        let n = labels.len();
        DistanceMatrix { labels, values: vec![0.0; n * n] }
    }

    /// Builds a matrix from rows, checking shape, symmetry (1e-12),
    /// a zero diagonal and non-negative finite entries.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, FormatError> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(FormatError::Invalid(format!("matrix must be {n}x{n}")));
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(FormatError::Invalid(format!("entry ({i},{j}) = {v} is not a non-negative number")));
                }
                if i == j && v != 0.0 {
                    return Err(FormatError::Invalid(format!("diagonal entry {i} is {v}")));
                }
                if (v - rows[j][i]).abs() > 1e-12 {
                    return Err(FormatError::Invalid(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(DistanceMatrix { labels, values: rows.into_iter().flatten().collect() })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    fn set_pair(&mut self, i: usize, j: usize, v: f64) {
        let n = self.len();
        self.values[i * n + j] = v;
        self.values[j * n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// `id,<label>...` header, then one row per label.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["id".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (i, l) in self.labels.iter().enumerate() {
            let mut rec = vec![l.clone()];
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self, FormatError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        let labels: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.get(0) != labels.get(i).map(String::as_str) {
                return Err(FormatError::Row { row: i + 2, detail: "row label does not match header".into() });
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FormatError::Row { row: i + 2, detail: e.to_string() })?;
            rows.push(row);
        }
        Self::from_rows(labels, rows)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            labels: &'a [String],
            values: Vec<Vec<f64>>,
        }
        serde_json::to_string_pretty(&Doc { labels: &self.labels, values: self.rows() }).expect("serializes")
    }
}

/// All pairwise distances; labels keep input order.
pub fn pairwise_matrix(traces: &[TraceSequence], cfg: &DistanceConfig) -> Result<DistanceMatrix, DistanceError> {
    if traces.is_empty() {
        return Err(DistanceError::Empty);
    }
    for t in traces {
        if t.seq.kind_name() != cfg.metric.as_str() {
            return Err(DistanceError::WrongKind { metric: cfg.metric.as_str(), found: t.seq.kind_name() });
        }
    }
    if cfg.metric == MetricKind::Mpl {
        let n0 = traces[0].seq.len();
        if let Some(t) = traces.iter().find(|t| t.seq.len() != n0) {
            return Err(DistanceError::LengthMismatch { left: n0, right: t.seq.len() });
        }
    }
    let n = traces.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| distance(&traces[i].seq, &traces[j].seq, cfg))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut m = DistanceMatrix::zeros(traces.iter().map(|t| t.id.clone()).collect());
    for (i, row) in upper.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            m.set_pair(i, i + 1 + k, v);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{parse_daedalus_states, Delta};

    fn st(s: &str) -> MplState {
        s.parse().unwrap()
    }

    #[test]
    fn state_diff_rules() {
        let w = MplWeights::default();
        let a = st("target: increase, non-target: unchanged");
        assert_eq!(mpl_state_diff(&a, &a, &w), 0.0);
        let dec = st("target: decrease, non-target: unchanged");
        assert_eq!(mpl_state_diff(&dec, &a, &w), 10.0);
        let x = st("target: increase_unchanged, non-target: unchanged");
        let y = st("target: increase, non-target: increase");
        assert_eq!(mpl_state_diff(&x, &y, &w), 6.0);
        let z = st("target: increase, non-target: decrease_increase");
        assert_eq!(mpl_state_diff(&y, &z, &w), 5.0);
    }

    #[test]
    fn sequence_length_mismatch() {
        let w = MplWeights::default();
        let a = vec![MplState::uniform(Delta::Increase, Delta::Increase); 5];
        assert_eq!(
            mpl_sequence_distance(&a, &a[..4], &w),
            Err(DistanceError::LengthMismatch { left: 5, right: 4 })
        );
        assert_eq!(mpl_sequence_distance(&a, &a, &w), Ok(0.0));
    }

    fn d(labels: &[&str]) -> Vec<DaedalusState> {
        parse_daedalus_states(labels).unwrap()
    }

    #[test]
    fn dtw_small_cases() {
        assert_eq!(dtw_mismatches::<u8>(&[], &[]), 0);
        assert_eq!(dtw_mismatches(&[1], &[]), 1);
        assert_eq!(dtw_mismatches(&[1, 2, 3], &[1, 2, 3]), 0);
        assert_eq!(dtw_mismatches(&[1, 2, 3], &[1, 2, 2, 3]), 0);
        assert_eq!(dtw_mismatches(&[1, 9, 3], &[1, 3]), 1);
        assert_eq!(dtw_mismatches(&[1, 2], &[3, 4]), 2);
    }

    #[test]
    fn extra_failed_many_times_costs_four() {
        let p = DaedalusPenalties::default();
        let a = d(&["relevant_cue", "solved_safe"]);
        let b = d(&["relevant_cue", "failed_many_times", "solved_safe"]);
        assert_eq!(daedalus_distance(&a, &b, &p), 4.0);
        assert_eq!(daedalus_distance(&b, &a, &p), 4.0);
    }

    #[test]
    fn gave_up_without_trying_vs_complete() {
        let p = DaedalusPenalties::default();
        let done = d(&["relevant_cue", "solved_glyph", "relevant_cue", "solved_safe"]);
        let empty = d(&["gave_up_without_trying"]);
        let b = daedalus_breakdown(&done, &empty, &p.final_puzzle);
        assert!(b.gave_up_disparity && b.without_trying_disparity && b.final_mismatch);
        assert_eq!(b.solved_mismatches, 2);
        assert_eq!(b.earliness_gap, 2);
        // 4 dtw + 2 solved + 1 final + 300 + 400 + 20 earliness
        assert_eq!(daedalus_distance(&done, &empty, &p), 727.0);
    }

    #[test]
    fn completers_pay_no_earliness() {
        let a = d(&["solved_a", "solved_safe"]);
        let b = d(&["solved_safe"]);
        assert_eq!(daedalus_breakdown(&a, &b, "safe").earliness_gap, 0);
    }

    #[test]
    fn config_validation_and_json() {
        let mut cfg = DistanceConfig::daedalus();
        assert!(cfg.validate().is_ok());
        cfg.daedalus.gave_up_disparity = -1.0;
        cfg.mpl.target_other = f64::NAN;
        let errs = cfg.validate().unwrap_err();
        let fields: Vec<_> = errs.iter().map(|e| e.field.as_str()).collect();
        assert_eq!(fields, ["mpl.target_other", "daedalus.gave_up_disparity"]);

        let ok = DistanceConfig::from_json_checked(r#"{"metric":"mpl","mpl":{"target_decrease":20}}"#).unwrap();
        assert_eq!(ok.mpl.target_decrease, 20.0);
        assert_eq!(ok.mpl.target_other, 4.0);
        assert!(DistanceConfig::from_json_checked(r#"{"mpl":{"bogus":1}}"#).is_err());
        let errs = DistanceConfig::from_json_checked(r#"{"daedalus":{"failed_once":-3}}"#).unwrap_err();
        assert_eq!(errs[0].field, "daedalus.failed_once");
    }

    #[test]
    fn weight_warnings() {
        let mut w = MplWeights::default();
        assert!(w.warnings().is_empty());
        w.target_decrease = 1.0;
        assert_eq!(w.warnings().len(), 1);
    }

    #[test]
    fn pairwise_basic() {
        let cfg = DistanceConfig::daedalus();
        let one = vec![TraceSequence::daedalus("a", d(&["relevant_cue"]))];
        let m = pairwise_matrix(&one, &cfg).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.get(0, 0), 0.0);

        let dup = vec![
            TraceSequence::daedalus("a", d(&["relevant_cue", "solved_safe"])),
            TraceSequence::daedalus("b", d(&["relevant_cue", "solved_safe"])),
        ];
        let m = pairwise_matrix(&dup, &cfg).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.labels, ["a", "b"]);

        assert_eq!(pairwise_matrix(&[], &cfg), Err(DistanceError::Empty));
        assert!(matches!(pairwise_matrix(&dup, &DistanceConfig::mpl()), Err(DistanceError::WrongKind { .. })));
    }

    #[test]
    fn mixed_lengths_rejected_under_mpl() {
        let s = MplState::uniform(Delta::Increase, Delta::Increase);
        let t = vec![TraceSequence::mpl("a", vec![s.clone(); 5]), TraceSequence::mpl("b", vec![s; 4])];
        assert!(matches!(
            pairwise_matrix(&t, &DistanceConfig::mpl()),
            Err(DistanceError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn matrix_csv_round_trip() {
        let t = vec![
            TraceSequence::daedalus("a", d(&["relevant_cue", "solved_safe"])),
            TraceSequence::daedalus("b", d(&["irrelevant_cue", "gave_up_0"])),
            TraceSequence::daedalus("c", d(&["gave_up_without_trying"])),
        ];
        let m = pairwise_matrix(&t, &DistanceConfig::daedalus()).unwrap();
        let back = DistanceMatrix::from_csv(m.to_csv().as_bytes()).unwrap();
        assert_eq!(back, m);
        assert!(DistanceMatrix::from_csv("id,a,b\na,0,1\nb,2,0\n".as_bytes()).is_err());
        assert!(DistanceMatrix::from_csv("id,a\na,1\n".as_bytes()).is_err());
    }
}
