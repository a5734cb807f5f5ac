//! The self-contained document the explorer renders.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use teamtrace_core::adaptscore::{adaptation_scores, AdaptationScore, BandCuts, IdealTrace};
use teamtrace_core::distance::{distance, pairwise_matrix, DistanceConfig};
use teamtrace_core::model::RawEvent;
use teamtrace_core::states::{Sequence, TraceSequence};

use crate::error::LayoutError;
use crate::graph::{build_state_graph, StateGraph};
use crate::mds::mds_embed;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub id: String,
    pub states: Vec<String>,
    /// Sorted trace ids.
    pub members: Vec<String>,
    pub popularity: usize,
    pub x: f64,
    pub y: f64,
    /// Mean annotation over members that have one.
    pub mean_annotation: Option<f64>,
    pub distance_to_ideal: f64,
    pub is_ideal: bool,
}

/// Distinct sequences, sorted by their state labels, embedded in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceGraph {
    pub patterns: Vec<Pattern>,
    pub stress: f64,
}

impl SequenceGraph {
    pub fn pattern(&self, id: &str) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.id == id)
    }

    pub fn pattern_of_trace(&self, trace_id: &str) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.members.binary_search_by(|m| m.as_str().cmp(trace_id)).is_ok())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub schema_version: u32,
    /// Increases by one on every committed recompute.
    pub version: u64,
    pub config: DistanceConfig,
    pub state_graph: StateGraph,
    pub sequence_graph: SequenceGraph,
    pub ideal_pattern_id: String,
    /// What `mean_annotation` measures, e.g. a final score.
    pub annotation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRow {
    pub id: String,
    pub metric: String,
    pub value: f64,
}

/// Everything a layout is computed from, apart from the distance config.
#[derive(Debug, Clone)]
pub struct LayoutInputs {
    pub traces: Vec<TraceSequence>,
    pub ideal: IdealTrace,
    pub annotation: Option<String>,
    /// Trace id to annotation value.
    pub annotations: BTreeMap<String, f64>,
    /// Trace id to its raw events, for drill-down.
    pub events: BTreeMap<String, Vec<RawEvent>>,
    pub performance: Vec<PerformanceRow>,
    pub bands: BandCuts,
}

impl LayoutInputs {
    pub fn new(traces: Vec<TraceSequence>, ideal: IdealTrace) -> Self {
        LayoutInputs {
            traces,
            ideal,
            annotation: None,
            annotations: BTreeMap::new(),
            events: BTreeMap::new(),
            performance: Vec::new(),
            bands: BandCuts::Quartiles,
        }
    }

    pub fn trace(&self, id: &str) -> Option<&TraceSequence> {
        self.traces.iter().find(|t| t.id == id)
    }
}

/// A committed layout together with the scores computed alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub document: LayoutDocument,
    pub scores: Vec<AdaptationScore>,
}

pub fn build_sequence_graph(
    traces: &[TraceSequence],
    ideal: &Sequence,
    cfg: &DistanceConfig,
    annotations: &BTreeMap<String, f64>,
) -> Result<(SequenceGraph, String), LayoutError> {
    if traces.is_empty() {
        return Err(LayoutError::Empty);
    }
    let mut groups: BTreeMap<Vec<String>, (Sequence, Vec<String>)> = BTreeMap::new();
    for t in traces {
        groups.entry(t.seq.labels()).or_insert_with(|| (t.seq.clone(), Vec::new())).1.push(t.id.clone());
    }
    groups.entry(ideal.labels()).or_insert_with(|| (ideal.clone(), Vec::new()));
    let ideal_labels = ideal.labels();

    let reps: Vec<TraceSequence> = groups
        .values()
        .enumerate()
        .map(|(i, (seq, _))| TraceSequence { id: format!("p{i}"), seq: seq.clone() })
        .collect();
    let matrix = pairwise_matrix(&reps, cfg)?;
    let embedding = mds_embed(&matrix.rows(), 2)?;

    let mut ideal_id = String::new();
    let mut patterns = Vec::with_capacity(reps.len());
    for (((labels, (_, mut members)), rep), xy) in groups.into_iter().zip(&reps).zip(&embedding.coords) {
        members.sort();
        let values: Vec<f64> = members.iter().filter_map(|m| annotations.get(m).copied()).collect();
        let is_ideal = labels == ideal_labels;
        if is_ideal {
            ideal_id = rep.id.clone();
        }
        patterns.push(Pattern {
            id: rep.id.clone(),
            popularity: members.len(),
            members,
            x: xy[0],
            y: xy[1],
            mean_annotation: (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64),
            distance_to_ideal: distance(&rep.seq, ideal, cfg)?,
            is_ideal,
            states: labels,
        });
    }
    Ok((SequenceGraph { patterns, stress: embedding.stress }, ideal_id))
}

pub fn analyze(inputs: &LayoutInputs, cfg: &DistanceConfig, version: u64) -> Result<Analysis, LayoutError> {
    let (sequence_graph, ideal_pattern_id) =
        build_sequence_graph(&inputs.traces, &inputs.ideal.sequence, cfg, &inputs.annotations)?;
    let scores = adaptation_scores(&inputs.traces, &inputs.ideal, cfg, &inputs.bands)?;
    Ok(Analysis {
        document: LayoutDocument {
            schema_version: SCHEMA_VERSION,
            version,
            config: cfg.clone(),
            state_graph: build_state_graph(&inputs.traces),
            sequence_graph,
            ideal_pattern_id,
            annotation: inputs.annotation.clone(),
        },
        scores,
    })
}
