//! Team and individual performance formulas.

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{FormatError, ScoreError};
use crate::model::{EventBody, RawEvent};

/// Net income divisor of the financial-performance score.
pub const FP_SCALE: f64 = 20_000_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarterFinancials {
    pub revenue: f64,
    pub expenses: f64,
}

/// Inputs for one target segment. `None` marks missing data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentInputs {
    pub segment: String,
    pub brand_judgment: Option<f64>,
    pub ad_judgment: Option<f64>,
    pub market_share: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JudgmentInputs {
    pub targets: Vec<SegmentInputs>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scorecard {
    pub quarter: u8,
    pub fp: f64,
    pub mp: f64,
    pub me: f64,
    pub bs: f64,
    pub cbs: f64,
}

fn pct(what: &'static str, seg: &SegmentInputs, v: Option<f64>) -> Result<f64, ScoreError> {
    let v = v.ok_or_else(|| ScoreError::MissingSegment { segment: seg.segment.clone(), what })?;
    if !(0.0..=100.0).contains(&v) {
        return Err(ScoreError::Range { what: format!("{what} of {}", seg.segment), value: v, lo: 0.0, hi: 100.0 });
    }
    Ok(v)
}

pub fn financial_performance(fin: &QuarterFinancials) -> f64 {
    (fin.revenue - fin.expenses) / FP_SCALE * 100.0
}

/// Balanced scorecard for one quarter; `prev_cbs` is the cumulative score
/// through the previous quarter.
pub fn scorecard(
    quarter: u8,
    fin: &QuarterFinancials,
    j: &JudgmentInputs,
    prev_cbs: f64,
) -> Result<Scorecard, ScoreError> {
    if j.targets.is_empty() || j.targets.len() > 2 {
        return Err(ScoreError::Invalid(format!("need 1 or 2 target segments, got {}", j.targets.len())));
    }
    if !fin.revenue.is_finite() || !fin.expenses.is_finite() {
        return Err(ScoreError::Invalid("revenue and expenses must be finite".into()));
    }
    let mut brand = 0.0;
    let mut ad = 0.0;
    let mut mp = 0.0;
    for seg in &j.targets {
        brand += pct("brand judgment", seg, seg.brand_judgment)?;
        ad += pct("ad judgment", seg, seg.ad_judgment)?;
        mp += pct("market share", seg, seg.market_share)?;
    }
    let k = j.targets.len() as f64;
    let me = (brand / k + ad / k) / 2.0;
    let fp = financial_performance(fin);
    let bs = (fp + mp + me) / 3.0;
    Ok(Scorecard { quarter, fp, mp, me, bs, cbs: prev_cbs + bs })
}

/// Scorecards for consecutive quarters with the running CBS.
pub fn scorecards(quarters: &[(u8, QuarterFinancials, JudgmentInputs)]) -> Result<Vec<Scorecard>, ScoreError> {
    let mut cbs = 0.0;
    quarters
        .iter()
        .map(|(q, fin, j)| {
            let s = scorecard(*q, fin, j, cbs)?;
            cbs = s.cbs;
            Ok(s)
        })
        .collect()
}

/// Reads `team_id,quarter,revenue,expenses,segment,brand_judgment,ad_judgment,market_share`,
/// one row per team, quarter and target segment (empty cells are missing
/// values), and returns scorecards per team.
pub fn read_scorecard_csv<R: Read>(reader: R) -> Result<BTreeMap<String, Vec<Scorecard>>, FormatError> {
    #[derive(Deserialize)]
    struct Row {
        team_id: String,
        quarter: u8,
        revenue: f64,
        expenses: f64,
        segment: String,
        brand_judgment: Option<f64>,
        ad_judgment: Option<f64>,
        market_share: Option<f64>,
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut grouped: BTreeMap<String, BTreeMap<u8, (QuarterFinancials, JudgmentInputs)>> = BTreeMap::new();
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let r = rec?;
        let q = grouped.entry(r.team_id).or_default().entry(r.quarter).or_insert_with(|| {
            (QuarterFinancials { revenue: r.revenue, expenses: r.expenses }, JudgmentInputs::default())
        });
        if q.0.revenue != r.revenue || q.0.expenses != r.expenses {
            return Err(FormatError::Row { row: i + 2, detail: "financials differ within one quarter".into() });
        }
        q.1.targets.push(SegmentInputs {
            segment: r.segment,
            brand_judgment: r.brand_judgment,
            ad_judgment: r.ad_judgment,
            market_share: r.market_share,
        });
    }
    grouped
        .into_iter()
        .map(|(team, qs)| {
            let rows: Vec<_> = qs.into_iter().map(|(q, (f, j))| (q, f, j)).collect();
            let cards = scorecards(&rows).map_err(|e| FormatError::Invalid(format!("team {team}: {e}")))?;
            Ok((team, cards))
        })
        .collect()
}

/// Completion time adjusted by the egg bonus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeamTimeScore {
    pub raw_completion: f64,
    pub eggs_hatched: u32,
    pub adjusted: f64,
}

pub const REQUIRED_EGGS: u32 = 3;
pub const HOURS_PER_EXTRA_EGG: f64 = 5.0;

/// Each egg beyond the required three removes five hours; clamped at zero.
pub fn team_time_score(raw_hours: f64, eggs: u32) -> Result<TeamTimeScore, ScoreError> {
    if !raw_hours.is_finite() || raw_hours < 0.0 {
        return Err(ScoreError::Range { what: "raw completion hours".into(), value: raw_hours, lo: 0.0, hi: f64::INFINITY });
    }
    let bonus = HOURS_PER_EXTRA_EGG * eggs.saturating_sub(REQUIRED_EGGS) as f64;
    Ok(TeamTimeScore { raw_completion: raw_hours, eggs_hatched: eggs, adjusted: (raw_hours - bonus).max(0.0) })
}

/// `1 - adjusted / max_adjusted` across the cohort (all 1 when every
/// adjusted time is zero). Lower times map to higher scores.
pub fn team_score_norm(adjusted: &[f64]) -> Vec<f64> {
    let max = adjusted.iter().copied().fold(0.0, f64::max);
    adjusted.iter().map(|a| if max > 0.0 { 1.0 - a / max } else { 1.0 }).collect()
}

/// Completion instants for one puzzle (any consistent unit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuzzleTiming {
    pub quickest: f64,
    pub slowest: f64,
    /// `None` if this player never solved the puzzle.
    pub player: Option<f64>,
}

/// Puzzle activity: `sum_i(PCR * TF_i) / N` over solved puzzles, with
/// `PCR = solved / N` and `TF_i = (T_s - T_n) / (T_s - T_q)` (1 when the
/// quickest and slowest times coincide).
pub fn puzzle_activity(timings: &[PuzzleTiming], n_puzzles: usize) -> Result<f64, ScoreError> {
    if n_puzzles == 0 {
        return Err(ScoreError::Invalid("puzzle count must be >= 1".into()));
    }
    if timings.len() > n_puzzles {
        return Err(ScoreError::Invalid(format!("{} timings for {n_puzzles} puzzles", timings.len())));
    }
    let mut tfs = Vec::new();
    for (i, t) in timings.iter().enumerate() {
        let Some(tn) = t.player else { continue };
        if !(t.quickest <= tn && tn <= t.slowest) {
            return Err(ScoreError::Timing { puzzle: i });
        }
        let span = t.slowest - t.quickest;
        tfs.push(if span > 0.0 { (t.slowest - tn) / span } else { 1.0 });
    }
    let n = n_puzzles as f64;
    let pcr = tfs.len() as f64 / n;
    Ok(tfs.iter().fold(0.0, |acc, tf| acc + pcr * tf) / n)
}

/// Chat activity: this player's message count over the team maximum.
pub fn chat_activity(counts: &BTreeMap<String, u64>, player: &str) -> Result<f64, ScoreError> {
    let mine = *counts.get(player).ok_or_else(|| ScoreError::UnknownPlayer(player.to_string()))?;
    let max = counts.values().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(ScoreError::NoMessages);
    }
    Ok(mine as f64 / max as f64)
}

/// Relative weights of puzzle and chat activity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndividualMix {
    pub puzzle: f64,
    pub chat: f64,
}

impl Default for IndividualMix {
    fn default() -> Self {
        IndividualMix { puzzle: 2.0 / 3.0, chat: 1.0 / 3.0 }
    }
}

pub fn individual_performance(pa: f64, ca: f64, team_score_norm: f64, mix: &IndividualMix) -> f64 {
    (mix.puzzle * pa + mix.chat * ca) * team_score_norm
}

/// Per-player solve instants (seconds since the epoch) and message counts
/// gathered from one team's events.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TeamActivity {
    /// player -> puzzle -> first solve instant
    pub solves: BTreeMap<String, BTreeMap<String, f64>>,
    pub messages: BTreeMap<String, u64>,
}

impl TeamActivity {
    pub fn from_events(events: &[RawEvent]) -> Self {
        let mut out = TeamActivity::default();
        for e in events {
            let player = e.player_id().to_string();
            out.messages.entry(player.clone()).or_insert(0);
            out.solves.entry(player.clone()).or_default();
            let t = e.ts().timestamp_millis() as f64 / 1000.0;
            match e.body() {
                EventBody::PuzzleSolved { puzzle_id } => {
                    let slot = out.solves.get_mut(&player).unwrap().entry(puzzle_id.to_string()).or_insert(t);
                    *slot = slot.min(t);
                }
                EventBody::ChatMessage { .. } => *out.messages.get_mut(&player).unwrap() += 1,
                _ => {}
            }
        }
        out
    }

    /// Timings of `player` for each puzzle in `puzzles`, quickest and
    /// slowest taken over the team members who solved it.
    pub fn timings(&self, player: &str, puzzles: &[String]) -> Vec<PuzzleTiming> {
        puzzles
            .iter()
            .map(|p| {
                let times: Vec<f64> = self.solves.values().filter_map(|m| m.get(p).copied()).collect();
                let quickest = times.iter().copied().fold(f64::INFINITY, f64::min);
                let slowest = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mine = self.solves.get(player).and_then(|m| m.get(p).copied());
                PuzzleTiming { quickest, slowest, player: mine }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualScore {
    pub team_id: String,
    pub player_id: String,
    pub pa: f64,
    /// `None` when nobody in the team chatted.
    pub ca: Option<f64>,
    pub team_score_norm: f64,
    pub ips: f64,
}

/// Individual scores for every player of every team. `adjusted` holds
/// each team's adjusted completion time.
pub fn individual_scores(
    teams: &BTreeMap<String, TeamActivity>,
    adjusted: &BTreeMap<String, f64>,
    puzzles: &[String],
    mix: &IndividualMix,
) -> Result<Vec<IndividualScore>, ScoreError> {
    let ids: Vec<&String> = teams.keys().collect();
    let times: Vec<f64> = ids
        .iter()
        .map(|t| adjusted.get(*t).copied().ok_or_else(|| ScoreError::Invalid(format!("no completion time for team {t}"))))
        .collect::<Result<_, _>>()?;
    let norms = team_score_norm(&times);
    let mut out = Vec::new();
    for (team, norm) in ids.into_iter().zip(norms) {
        let act = &teams[team];
        for player in act.messages.keys() {
            let pa = puzzle_activity(&act.timings(player, puzzles), puzzles.len())?;
            let ca = match chat_activity(&act.messages, player) {
                Ok(c) => Some(c),
                Err(ScoreError::NoMessages) => None,
                Err(e) => return Err(e),
            };
            let ips = individual_performance(pa, ca.unwrap_or(0.0), norm, mix);
            out.push(IndividualScore { team_id: team.clone(), player_id: player.clone(), pa, ca, team_score_norm: norm, ips });
        }
    }
    Ok(out)
}
