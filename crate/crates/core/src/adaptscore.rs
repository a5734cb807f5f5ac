//! Adaptation scores: cohort-normalized closeness to an ideal trace.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{distance, DistanceConfig};
use crate::error::ScoreError;
use crate::states::{DaedalusState, Delta, MplState, Sequence, TraceSequence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "trace_id", rename_all = "snake_case")]
pub enum Provenance {
    DesignerSpecified,
    ExpertSelected(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealTrace {
    pub sequence: Sequence,
    pub provenance: Provenance,
}

impl IdealTrace {
    /// Five quarters of `target: increase, non-target: increase`.
    pub fn mpl_default() -> Self {
        IdealTrace {
            sequence: Sequence::Mpl(vec![MplState::uniform(Delta::Increase, Delta::Increase); 5]),
            provenance: Provenance::DesignerSpecified,
        }
    }

    /// A relevant cue followed by the solve, for every puzzle in order.
    pub fn daedalus_default(puzzle_order: &[String]) -> Self {
        let states = puzzle_order
            .iter()
            .flat_map(|p| [DaedalusState::RelevantCue, DaedalusState::Solved(p.clone())])
            .collect();
        IdealTrace { sequence: Sequence::Daedalus(states), provenance: Provenance::DesignerSpecified }
    }

    pub fn from_trace(t: &TraceSequence) -> Self {
        IdealTrace { sequence: t.seq.clone(), provenance: Provenance::ExpertSelected(t.id.clone()) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    High,
    MidHigh,
    MidLow,
    Low,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::High => "high",
            Band::MidHigh => "mid_high",
            Band::MidLow => "mid_low",
            Band::Low => "low",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Score thresholds separating the four bands. `Quartiles` derives them
/// from the cohort.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BandCuts {
    #[default]
    Quartiles,
    /// Ascending: low | mid_low | mid_high | high.
    Fixed { cuts: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptationScore {
    pub trace_id: String,
    pub raw_distance: f64,
    pub score: f64,
    pub band: Band,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn band_of(score: f64, cuts: &[f64; 3]) -> Band {
    if score >= cuts[2] {
        Band::High
    } else if score >= cuts[1] {
        Band::MidHigh
    } else if score >= cuts[0] {
        Band::MidLow
    } else {
        Band::Low
    }
}

/// Scores every trace by `1 - d / d_max`, `d` being its distance to the ideal.
pub fn adaptation_scores(
    cohort: &[TraceSequence],
    ideal: &IdealTrace,
    cfg: &DistanceConfig,
    bands: &BandCuts,
) -> Result<Vec<AdaptationScore>, ScoreError> {
    if cohort.is_empty() {
        return Err(ScoreError::EmptyCohort);
    }
    let dists: Vec<f64> = cohort
        .par_iter()
        .map(|t| distance(&t.seq, &ideal.sequence, cfg))
        .collect::<Result<_, _>>()?;
    let d_max = dists.iter().copied().fold(0.0, f64::max);
    let scores: Vec<f64> = dists.iter().map(|d| if d_max > 0.0 { 1.0 - d / d_max } else { 1.0 }).collect();

    let cuts = match bands {
        BandCuts::Quartiles => {
            let mut sorted = scores.clone();
            sorted.sort_by(f64::total_cmp);
            [quantile(&sorted, 0.25), quantile(&sorted, 0.5), quantile(&sorted, 0.75)]
        }
        BandCuts::Fixed { cuts } => {
            if !cuts.windows(2).all(|w| w[0] <= w[1]) {
                return Err(ScoreError::Invalid("band cuts must be ascending".into()));
            }
            *cuts
        }
    };
    Ok(cohort
        .iter()
        .zip(dists)
        .zip(scores)
        .map(|((t, raw_distance), score)| AdaptationScore {
            trace_id: t.id.clone(),
            raw_distance,
            score,
            band: band_of(score, &cuts),
        })
        .collect())
}

/// Indices ordered from best to worst score. Scores within 1e-9 of each
/// other tie, and ties keep input order.
pub fn ranking(scores: &[AdaptationScore]) -> Vec<usize> {
    let key = |s: &AdaptationScore| (s.score * 1e9).round() as i64;
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| key(&scores[b]).cmp(&key(&scores[a])));
    idx
}

pub fn scores_to_csv(scores: &[AdaptationScore]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["trace_id", "raw_distance", "score", "band"]).expect("in-memory write");
    for s in scores {
        w.write_record([s.trace_id.clone(), s.raw_distance.to_string(), s.score.to_string(), s.band.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::parse_daedalus_states;

    fn mpl(id: &str, states: &[&str]) -> TraceSequence {
        TraceSequence::mpl(id, states.iter().map(|s| s.parse().unwrap()).collect())
    }

    const IDEAL: &str = "target: increase, non-target: increase";

    #[test]
    fn ideal_alone_scores_one() {
        let cohort = vec![mpl("ideal", &[IDEAL; 5])];
        let s = adaptation_scores(&cohort, &IdealTrace::mpl_default(), &DistanceConfig::mpl(), &BandCuts::Quartiles)
            .unwrap();
        assert_eq!(s[0].score, 1.0);
        assert_eq!(s[0].band, Band::High);
    }

    #[test]
    fn closer_final_score_ranks_higher() {
        let me92 = mpl(
            "me92",
            &[
                IDEAL,
                "target: increase, non-target: increase_unchanged",
                "target: decrease_increase, non-target: increase",
                IDEAL,
                "target: unchanged, non-target: increase",
            ],
        );
        let me69 = mpl(
            "me69",
            &[
                IDEAL,
                "target: increase, non-target: increase_unchanged",
                "target: decrease_unchanged, non-target: increase",
                IDEAL,
                "target: decrease_unchanged, non-target: unchanged",
            ],
        );
        let cohort = vec![mpl("ideal", &[IDEAL; 5]), me69, me92];
        let s = adaptation_scores(&cohort, &IdealTrace::mpl_default(), &DistanceConfig::mpl(), &BandCuts::Quartiles)
            .unwrap();
        assert_eq!(s[1].raw_distance, 24.0);
        assert_eq!(s[2].raw_distance, 16.0);
        assert!(s[2].score > s[1].score);
        assert_eq!(s[1].score, 0.0);
        assert_eq!(ranking(&s), vec![0, 2, 1]);
    }

    #[test]
    fn clean_completer_beats_struggler() {
        let order: Vec<String> = ["a", "safe"].map(String::from).to_vec();
        let ideal = IdealTrace::daedalus_default(&order);
        let d = |l: &[&str]| parse_daedalus_states(l).unwrap();
        let cohort = vec![
            TraceSequence::daedalus("clean", d(&["relevant_cue", "solved_a", "relevant_cue", "solved_safe"])),
            TraceSequence::daedalus(
                "struggle",
                d(&["irrelevant_cue", "relevant_cue", "failed_many_times", "solved_a", "failed_once", "relevant_cue", "solved_safe"]),
            ),
            TraceSequence::daedalus("quit", d(&["relevant_cue", "gave_up_0"])),
        ];
        let s = adaptation_scores(&cohort, &ideal, &DistanceConfig::daedalus(), &BandCuts::Quartiles).unwrap();
        assert!(s[0].score >= s[1].score);
        assert!(s[1].score > s[2].score);
        assert_eq!(s[0].band, Band::High);
        assert_eq!(s[2].band, Band::Low);
    }

    #[test]
    fn all_zero_distances() {
        let cohort = vec![mpl("a", &[IDEAL; 5]), mpl("b", &[IDEAL; 5])];
        let s = adaptation_scores(&cohort, &IdealTrace::mpl_default(), &DistanceConfig::mpl(), &BandCuts::Quartiles)
            .unwrap();
        assert!(s.iter().all(|x| x.score == 1.0));
    }

    #[test]
    fn errors() {
        let ideal = IdealTrace::mpl_default();
        assert_eq!(
            adaptation_scores(&[], &ideal, &DistanceConfig::mpl(), &BandCuts::Quartiles),
            Err(ScoreError::EmptyCohort)
        );
        let cohort = vec![mpl("a", &[IDEAL; 5])];
        assert!(adaptation_scores(&cohort, &ideal, &DistanceConfig::daedalus(), &BandCuts::Quartiles).is_err());
        let bad = BandCuts::Fixed { cuts: [0.9, 0.5, 0.1] };
        assert!(adaptation_scores(&cohort, &ideal, &DistanceConfig::mpl(), &bad).is_err());
    }

    #[test]
    fn fixed_cuts() {
        assert_eq!(band_of(0.95, &[0.25, 0.5, 0.75]), Band::High);
        assert_eq!(band_of(0.5, &[0.25, 0.5, 0.75]), Band::MidHigh);
        assert_eq!(band_of(0.3, &[0.25, 0.5, 0.75]), Band::MidLow);
        assert_eq!(band_of(0.0, &[0.25, 0.5, 0.75]), Band::Low);
    }

    #[test]
    fn csv_columns() {
        let cohort = vec![mpl("a", &[IDEAL; 5])];
        let s = adaptation_scores(&cohort, &IdealTrace::mpl_default(), &DistanceConfig::mpl(), &BandCuts::Quartiles)
            .unwrap();
        assert_eq!(scores_to_csv(&s), "trace_id,raw_distance,score,band\na,0,1,high\n");
    }
}
