//! Symbolic state alphabets and labelled state sequences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::AbstractionError;

/// Quarter-over-quarter change of a brand judgment in one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Delta {
    Increase,
    Decrease,
    Unchanged,
}

impl Delta {
    pub fn as_str(self) -> &'static str {
        match self {
            Delta::Increase => "increase",
            Delta::Decrease => "decrease",
            Delta::Unchanged => "unchanged",
        }
    }
}

/// Composite label over one or more segments, e.g. `increase_unchanged`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MplLabel(pub Vec<Delta>);

impl MplLabel {
    pub fn single(d: Delta) -> Self {
        MplLabel(vec![d])
    }

    pub fn has_decrease(&self) -> bool {
        self.0.contains(&Delta::Decrease)
    }
}

impl fmt::Display for MplLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("_")?;
            }
            f.write_str(d.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for MplLabel {
    type Err = AbstractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .trim()
            .split('_')
            .map(|p| match p {
                "increase" => Ok(Delta::Increase),
                "decrease" => Ok(Delta::Decrease),
                "unchanged" => Ok(Delta::Unchanged),
                _ => Err(AbstractionError::Label(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MplLabel(parts))
    }
}

/// Per-quarter brand-judgment movement in target and non-target segments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MplState {
    pub target: MplLabel,
    pub non_target: MplLabel,
}

impl MplState {
    pub fn new(target: MplLabel, non_target: MplLabel) -> Self {
        MplState { target, non_target }
    }

    pub fn uniform(target: Delta, non_target: Delta) -> Self {
        MplState { target: MplLabel::single(target), non_target: MplLabel::single(non_target) }
    }
}

impl fmt::Display for MplState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "target: {}, non-target: {}", self.target, self.non_target)
    }
}

impl FromStr for MplState {
    type Err = AbstractionError;

    /// Accepts `target: X, non-target: Y` (also `non_target`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AbstractionError::Label(s.to_string());
        let (t, n) = s.split_once(',').ok_or_else(err)?;
        let t = t.trim().strip_prefix("target:").ok_or_else(err)?;
        let n = n.trim();
        let n = n
            .strip_prefix("non-target:")
            .or_else(|| n.strip_prefix("non_target:"))
            .ok_or_else(err)?;
        Ok(MplState { target: t.parse()?, non_target: n.parse()? })
    }
}

/// Symbolic state of a Daedalus play trace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DaedalusState {
    RelevantCue,
    IrrelevantCue,
    FailedOnce,
    FailedManyTimes,
    Solved(String),
    Navigation,
    NoRelevant,
    /// Terminal; carries the number of puzzles solved before leaving.
    GaveUp(u32),
    GaveUpWithoutTrying,
}

impl DaedalusState {
    pub fn is_gave_up(&self) -> bool {
        matches!(self, DaedalusState::GaveUp(_) | DaedalusState::GaveUpWithoutTrying)
    }

    pub fn solved(puzzle: impl Into<String>) -> Self {
        DaedalusState::Solved(puzzle.into())
    }
}

impl fmt::Display for DaedalusState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DaedalusState::RelevantCue => f.write_str("relevant_cue"),
            DaedalusState::IrrelevantCue => f.write_str("irrelevant_cue"),
            DaedalusState::FailedOnce => f.write_str("failed_once"),
            DaedalusState::FailedManyTimes => f.write_str("failed_many_times"),
            DaedalusState::Solved(p) => write!(f, "solved_{p}"),
            DaedalusState::Navigation => f.write_str("navigation"),
            DaedalusState::NoRelevant => f.write_str("no_relevant"),
            DaedalusState::GaveUp(k) => write!(f, "gave_up_{k}"),
            DaedalusState::GaveUpWithoutTrying => f.write_str("gave_up_without_trying"),
        }
    }
}

impl FromStr for DaedalusState {
    type Err = AbstractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "relevant_cue" => DaedalusState::RelevantCue,
            "irrelevant_cue" => DaedalusState::IrrelevantCue,
            "failed_once" => DaedalusState::FailedOnce,
            "failed_many_times" => DaedalusState::FailedManyTimes,
            "navigation" => DaedalusState::Navigation,
            "no_relevant" => DaedalusState::NoRelevant,
            "gave_up_without_trying" => DaedalusState::GaveUpWithoutTrying,
            _ => {
                if let Some(p) = s.strip_prefix("solved_").filter(|p| !p.is_empty()) {
                    DaedalusState::Solved(p.to_string())
                } else if let Some(k) = s.strip_prefix("gave_up_").and_then(|k| k.parse().ok()) {
                    DaedalusState::GaveUp(k)
                } else {
                    return Err(AbstractionError::Label(s.to_string()));
                }
            }
        })
    }
}

macro_rules! serde_via_str {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_str!(MplLabel);
serde_via_str!(MplState);
serde_via_str!(DaedalusState);

/// A state sequence in one of the two alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "states", rename_all = "snake_case")]
pub enum Sequence {
    Mpl(Vec<MplState>),
    Daedalus(Vec<DaedalusState>),
}

impl Sequence {
    pub fn len(&self) -> usize {
        match self {
            Sequence::Mpl(s) => s.len(),
            Sequence::Daedalus(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Sequence::Mpl(_) => "mpl",
            Sequence::Daedalus(_) => "daedalus",
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Sequence::Mpl(s) => s.iter().map(ToString::to_string).collect(),
            Sequence::Daedalus(s) => s.iter().map(ToString::to_string).collect(),
        }
    }
}

/// A sequence with the id of the trace it was abstracted from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceSequence {
    pub id: String,
    #[serde(flatten)]
    pub seq: Sequence,
}

impl TraceSequence {
    pub fn mpl(id: impl Into<String>, states: Vec<MplState>) -> Self {
        TraceSequence { id: id.into(), seq: Sequence::Mpl(states) }
    }

    pub fn daedalus(id: impl Into<String>, states: Vec<DaedalusState>) -> Self {
        TraceSequence { id: id.into(), seq: Sequence::Daedalus(states) }
    }
}

/// On-disk grouping of one team's sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub team_id: String,
    pub sequences: Vec<TraceSequence>,
}

impl SequenceFile {
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequence file serializes")
    }
}

/// Parses a whitespace/comma separated list of MPL states written one per
/// line, e.g. fixture tables.
pub fn parse_mpl_states<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<Vec<MplState>, AbstractionError> {
    lines.into_iter().map(str::parse).collect()
}

pub fn parse_daedalus_states(labels: &[&str]) -> Result<Vec<DaedalusState>, AbstractionError> {
    labels.iter().map(|l| l.parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mpl_state_text_form() {
        let s: MplState = "target: increase_unchanged, non-target: decrease".parse().unwrap();
        assert_eq!(s.target.0, vec![Delta::Increase, Delta::Unchanged]);
        assert_eq!(s.non_target, MplLabel::single(Delta::Decrease));
        assert_eq!(s.to_string(), "target: increase_unchanged, non-target: decrease");
        let alt: MplState = "target: increase, non_target: increase".parse().unwrap();
        assert_eq!(alt, MplState::uniform(Delta::Increase, Delta::Increase));
        assert!("target: up, non-target: down".parse::<MplState>().is_err());
    }

    #[test]
    fn daedalus_labels() {
        for l in [
            "relevant_cue",
            "irrelevant_cue",
            "failed_once",
            "failed_many_times",
            "solved_glyph",
            "navigation",
            "no_relevant",
            "gave_up_3",
            "gave_up_without_trying",
        ] {
            let s: DaedalusState = l.parse().unwrap();
            assert_eq!(s.to_string(), l);
        }
        assert!("solved_".parse::<DaedalusState>().is_err());
        assert!("gave_up_x".parse::<DaedalusState>().is_err());
    }

    #[test]
    fn sequence_json_shape() {
        let t = TraceSequence::daedalus("t1/a", vec![DaedalusState::RelevantCue, DaedalusState::solved("safe")]);
        let j = serde_json::to_string(&t).unwrap();
        assert_eq!(j, r#"{"id":"t1/a","kind":"daedalus","states":["relevant_cue","solved_safe"]}"#);
        let back: TraceSequence = serde_json::from_str(&j).unwrap();
        assert_eq!(back, t);
    }

    fn daedalus_state() -> impl Strategy<Value = DaedalusState> {
        prop_oneof![
            Just(DaedalusState::RelevantCue),
            Just(DaedalusState::IrrelevantCue),
            Just(DaedalusState::FailedOnce),
            Just(DaedalusState::FailedManyTimes),
            "[a-z][a-z_]{0,8}".prop_map(DaedalusState::Solved),
            Just(DaedalusState::Navigation),
            Just(DaedalusState::NoRelevant),
            (0u32..20).prop_map(DaedalusState::GaveUp),
            Just(DaedalusState::GaveUpWithoutTrying),
        ]
    }

    proptest! {
        #[test]
        fn daedalus_label_round_trip(s in daedalus_state()) {
            let back: DaedalusState = s.to_string().parse().unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
