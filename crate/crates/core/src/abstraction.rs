//! Raw traces to symbolic state sequences.
//!
//! Two schemes are implemented:
//!
//! * MPL: one state per quarter Q2..Q6 describing how the highest brand
//!   judgment moved in target and non-target segments.
//! * Daedalus: cue visits, failures, solves and attrition of one player.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::catalog::{ScreenCatalog, ScreenCategory};
use crate::error::{AbstractionError, FormatError};
use crate::model::{EventBody, RawEvent, Trace};
use crate::states::{DaedalusState, Delta, MplLabel, MplState, TraceSequence};

pub const QUARTERS: std::ops::RangeInclusive<u8> = 1..=6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbstractionConfig {
    /// A run of more than this many failures collapses to `failed_many_times`.
    /// Also the maximum gap (exclusive) of other states inside one run.
    pub failure_collapse_threshold: u32,
    /// How many preceding states are searched for a relevant cue before a
    /// solve. Counts every state kind, not only cues.
    pub no_relevant_window: u32,
    /// Fixed segment order for composite MPL labels.
    pub segment_order: Vec<String>,
    /// Required solve order of the Daedalus puzzles.
    pub puzzle_order: Vec<String>,
    /// Defaults to the last entry of `puzzle_order`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_puzzle: Option<String>,
}

impl Default for AbstractionConfig {
    fn default() -> Self {
        AbstractionConfig {
            failure_collapse_threshold: 3,
            no_relevant_window: 8,
            segment_order: ["mercedes", "traveler", "workhorse"].map(String::from).to_vec(),
            puzzle_order: ["few_dots", "many_dots", "cypher", "glyph", "safari", "safe"]
                .map(String::from)
                .to_vec(),
            final_puzzle: None,
        }
    }
}

impl AbstractionConfig {
    pub fn final_puzzle(&self) -> Option<&str> {
        self.final_puzzle.as_deref().or(self.puzzle_order.last().map(String::as_str))
    }

    pub fn validate(&self) -> Result<(), AbstractionError> {
        if self.failure_collapse_threshold < 1 {
            return Err(AbstractionError::Config("failure_collapse_threshold must be >= 1".into()));
        }
        if self.no_relevant_window < 1 {
            return Err(AbstractionError::Config("no_relevant_window must be >= 1".into()));
        }
        let unique: BTreeSet<_> = self.segment_order.iter().collect();
        if unique.len() != self.segment_order.len() {
            return Err(AbstractionError::Config("segment_order has duplicates".into()));
        }
        let unique: BTreeSet<_> = self.puzzle_order.iter().collect();
        if unique.len() != self.puzzle_order.len() {
            return Err(AbstractionError::Config("puzzle_order has duplicates".into()));
        }
        if let Some(f) = &self.final_puzzle {
            if !self.puzzle_order.contains(f) {
                return Err(AbstractionError::Config(format!("final puzzle {f:?} not in puzzle_order")));
            }
        }
        Ok(())
    }
}

/// Highest brand judgment per (quarter, segment).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JudgmentTable {
    values: BTreeMap<(u8, String), f64>,
}

impl JudgmentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, quarter: u8, segment: impl Into<String>, value: f64) {
        self.values.insert((quarter, segment.into()), value);
    }

    pub fn get(&self, quarter: u8, segment: &str) -> Option<f64> {
        self.values.get(&(quarter, segment.to_string())).copied()
    }

    pub fn segments(&self) -> BTreeSet<&str> {
        self.values.keys().map(|(_, s)| s.as_str()).collect()
    }

    fn require(&self, quarter: u8, segment: &str) -> Result<f64, AbstractionError> {
        let v = self.get(quarter, segment).ok_or_else(|| AbstractionError::MissingQuarter {
            quarter,
            segment: segment.to_string(),
        })?;
        if !(0.0..=100.0).contains(&v) {
            return Err(AbstractionError::JudgmentRange { quarter, segment: segment.to_string(), value: v });
        }
        Ok(v)
    }
}

/// One team's MPL inputs as read from CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TeamJudgments {
    pub table: JudgmentTable,
    pub targets: BTreeSet<String>,
}

/// Reads `quarter,segment,highest_brand_judgment` rows. Optional columns:
/// `team_id` (default `team`) and `target` (`true`/`false`/`1`/`0`).
pub fn read_judgment_csv<R: Read>(reader: R) -> Result<BTreeMap<String, TeamJudgments>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(qc), Some(sc), Some(jc)) = (col("quarter"), col("segment"), col("highest_brand_judgment")) else {
        return Err(FormatError::Invalid(
            "judgment CSV needs quarter, segment, highest_brand_judgment columns".into(),
        ));
    };
    let team_col = col("team_id");
    let target_col = col("target");
    let mut out: BTreeMap<String, TeamJudgments> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let bad = |detail: String| FormatError::Row { row, detail };
        let quarter: u8 = field(qc).parse().map_err(|_| bad(format!("bad quarter {:?}", field(qc))))?;
        if !QUARTERS.contains(&quarter) {
            return Err(bad(format!("quarter {quarter} not in 1..=6")));
        }
        let segment = field(sc).to_string();
        if segment.is_empty() {
            return Err(bad("empty segment".into()));
        }
        let value: f64 = field(jc).parse().map_err(|_| bad(format!("bad judgment {:?}", field(jc))))?;
        if !value.is_finite() {
            return Err(bad("judgment must be finite".into()));
        }
        let team = team_col.map(|c| field(c).to_string()).unwrap_or_else(|| "team".into());
        let entry = out.entry(team).or_default();
        entry.table.set(quarter, segment.clone(), value);
        if let Some(c) = target_col {
            match field(c).to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => {
                    entry.targets.insert(segment);
                }
                "false" | "0" | "no" | "" => {}
                other => return Err(bad(format!("bad target flag {other:?}"))),
            }
        }
    }
    Ok(out)
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn delta(prev: f64, cur: f64) -> Delta {
    let (prev, cur) = (round2(prev), round2(cur));
    if cur > prev {
        Delta::Increase
    } else if cur < prev {
        Delta::Decrease
    } else {
        Delta::Unchanged
    }
}

/// Five states, Q2..Q6. Judgments are compared after rounding to 2 decimals.
pub fn abstract_mpl(
    judgments: &JudgmentTable,
    targets: &BTreeSet<String>,
    cfg: &AbstractionConfig,
) -> Result<Vec<MplState>, AbstractionError> {
    cfg.validate()?;
    if targets.is_empty() || targets.len() > 2 {
        return Err(AbstractionError::Targets(format!("need 1 or 2 target segments, got {}", targets.len())));
    }
    if let Some(t) = targets.iter().find(|t| !cfg.segment_order.contains(t)) {
        return Err(AbstractionError::Targets(format!("target {t:?} not in segment_order")));
    }
    let target_segs: Vec<&str> =
        cfg.segment_order.iter().filter(|s| targets.contains(*s)).map(String::as_str).collect();
    let other_segs: Vec<&str> =
        cfg.segment_order.iter().filter(|s| !targets.contains(*s)).map(String::as_str).collect();
    if other_segs.is_empty() {
        return Err(AbstractionError::Targets("no non-target segment left".into()));
    }

    let mut table: BTreeMap<(u8, &str), f64> = BTreeMap::new();
    for q in QUARTERS {
        for seg in &cfg.segment_order {
            table.insert((q, seg.as_str()), judgments.require(q, seg)?);
        }
    }
    let label = |q: u8, segs: &[&str]| {
        MplLabel(segs.iter().map(|s| delta(table[&(q - 1, *s)], table[&(q, *s)])).collect())
    };
    Ok((2..=6).map(|q| MplState::new(label(q, &target_segs), label(q, &other_segs))).collect())
}

/// Latest time any team member solved the final puzzle.
pub fn team_completion_time(team_events: &[RawEvent], final_puzzle: &str) -> Option<DateTime<Utc>> {
    team_events
        .iter()
        .filter(|e| matches!(e.body(), EventBody::PuzzleSolved { puzzle_id } if puzzle_id == final_puzzle))
        .map(|e| e.ts())
        .max()
}

enum Raw {
    State(DaedalusState),
    Failure(String),
}

/// Abstracts one player's trace.
///
/// `team_completion` is the team's game-completion instant. A player with
/// unsolved puzzles whose last event precedes it (or whose team never
/// finished) receives a terminal `gave_up_k`.
pub fn abstract_daedalus(
    trace: &Trace,
    catalog: &ScreenCatalog,
    cfg: &AbstractionConfig,
    team_completion: Option<DateTime<Utc>>,
) -> Result<Vec<DaedalusState>, AbstractionError> {
    cfg.validate()?;
    if cfg.puzzle_order.is_empty() {
        return Err(AbstractionError::Config("puzzle_order must not be empty".into()));
    }
    if trace.owner().player_id.is_none() {
        return Err(AbstractionError::NotAPlayerTrace);
    }

    let mut solved: BTreeSet<&str> = BTreeSet::new();
    let mut raw = Vec::new();
    let mut acted = false;
    for e in trace.events() {
        match e.body() {
            EventBody::ScreenView { screen_id, .. } => {
                acted = true;
                let entry =
                    catalog.get(screen_id).ok_or_else(|| AbstractionError::UnknownScreen(screen_id.into()))?;
                let state = match entry.category {
                    ScreenCategory::Navigation => DaedalusState::Navigation,
                    _ => {
                        let next = cfg.puzzle_order.iter().find(|p| !solved.contains(p.as_str()));
                        if next.is_some_and(|p| entry.relevant_for.contains(p)) {
                            DaedalusState::RelevantCue
                        } else {
                            DaedalusState::IrrelevantCue
                        }
                    }
                };
                raw.push(Raw::State(state));
            }
            EventBody::ButtonPress { puzzle_id, correct } => {
                acted = true;
                if !correct {
                    raw.push(Raw::Failure(puzzle_id.to_string()));
                }
            }
            EventBody::PuzzleSolved { puzzle_id } => {
                acted = true;
                let p = cfg
                    .puzzle_order
                    .iter()
                    .find(|p| *p == puzzle_id)
                    .ok_or_else(|| AbstractionError::UnknownPuzzle(puzzle_id.into()))?;
                solved.insert(p.as_str());
                raw.push(Raw::State(DaedalusState::Solved(p.clone())));
            }
            EventBody::ChatMessage { .. }
            | EventBody::QuarterDecision { .. }
            | EventBody::QuarterResult { .. } => {}
        }
    }
    if !acted {
        return Ok(vec![DaedalusState::GaveUpWithoutTrying]);
    }

    let collapsed = collapse_failures(raw, cfg.failure_collapse_threshold as usize);
    let mut out = mark_no_relevant(collapsed, cfg.no_relevant_window as usize);

    let unfinished = cfg.puzzle_order.iter().any(|p| !solved.contains(p.as_str()));
    let left_early = match (team_completion, trace.last_ts()) {
        (Some(done), Some(last)) => last < done,
        _ => true,
    };
    if unfinished && left_early {
        let k = out.iter().filter(|s| matches!(s, DaedalusState::Solved(_))).count();
        out.push(DaedalusState::GaveUp(k as u32));
    }
    Ok(out)
}

/// Failures on the same puzzle separated by fewer than `threshold` other
/// states (and no solve) form a run; runs longer than `threshold` become a
/// single `failed_many_times` at the position of their first failure.
fn collapse_failures(raw: Vec<Raw>, threshold: usize) -> Vec<DaedalusState> {
    // run id per failure position
    let mut run_of: Vec<Option<usize>> = Vec::with_capacity(raw.len());
    let mut run_sizes: Vec<usize> = Vec::new();
    let mut open: Option<(usize, usize, &str)> = None; // (run, last index, puzzle)
    for (i, r) in raw.iter().enumerate() {
        match r {
            Raw::Failure(p) => {
                let run = match open {
                    Some((run, last, q)) if q == p && i - last - 1 < threshold => run,
                    _ => {
                        run_sizes.push(0);
                        run_sizes.len() - 1
                    }
                };
                run_sizes[run] += 1;
                run_of.push(Some(run));
                open = Some((run, i, p));
            }
            Raw::State(s) => {
                if matches!(s, DaedalusState::Solved(_)) {
                    open = None;
                }
                run_of.push(None);
            }
        }
    }

    let mut emitted = vec![false; run_sizes.len()];
    let mut out = Vec::with_capacity(raw.len());
    for (r, run) in raw.into_iter().zip(run_of) {
        match (r, run) {
            (Raw::State(s), _) => out.push(s),
            (Raw::Failure(_), Some(run)) if run_sizes[run] > threshold => {
                if !emitted[run] {
                    emitted[run] = true;
                    out.push(DaedalusState::FailedManyTimes);
                }
            }
            (Raw::Failure(_), _) => out.push(DaedalusState::FailedOnce),
        }
    }
    out
}

/// Inserts `no_relevant` before every solve that has no relevant cue among
/// the `window` states preceding it.
fn mark_no_relevant(states: Vec<DaedalusState>, window: usize) -> Vec<DaedalusState> {
    let mut out = Vec::with_capacity(states.len() + 4);
    // Distance (in states) back to the most recent relevant cue.
    let mut since_relevant: Option<usize> = None;
    for s in states {
        if matches!(s, DaedalusState::Solved(_)) && !since_relevant.is_some_and(|d| d <= window) {
            out.push(DaedalusState::NoRelevant);
        }
        since_relevant = match s {
            DaedalusState::RelevantCue => Some(1),
            _ => since_relevant.map(|d| d + 1),
        };
        out.push(s);
    }
    out
}

/// Abstracts every player of one team. `team_events` must hold all of the
/// team's events (used for the completion instant).
pub fn abstract_daedalus_team(
    traces: &[&Trace],
    team_events: &[RawEvent],
    catalog: &ScreenCatalog,
    cfg: &AbstractionConfig,
) -> Result<Vec<TraceSequence>, AbstractionError> {
    let done = cfg.final_puzzle().and_then(|f| team_completion_time(team_events, f));
    traces
        .iter()
        .map(|t| Ok(TraceSequence::daedalus(t.id(), abstract_daedalus(t, catalog, cfg, done)?)))
        .collect()
}
