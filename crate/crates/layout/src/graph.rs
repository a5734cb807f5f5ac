//! Node-link view of every state and transition in a cohort.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use teamtrace_core::states::TraceSequence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateNode {
    pub label: String,
    pub visit_count: u64,
    /// Some sequence begins here.
    pub is_start: bool,
    /// Some sequence ends here.
    pub is_end: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateEdge {
    pub from: String,
    pub to: String,
    pub count: u64,
}

/// Nodes sorted by label, edges by `(from, to)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateGraph {
    pub nodes: Vec<StateNode>,
    pub edges: Vec<StateEdge>,
}

impl StateGraph {
    pub fn node(&self, label: &str) -> Option<&StateNode> {
        self.nodes.binary_search_by(|n| n.label.as_str().cmp(label)).ok().map(|i| &self.nodes[i])
    }

    pub fn edge_count(&self, from: &str, to: &str) -> u64 {
        self.edges
            .binary_search_by(|e| (e.from.as_str(), e.to.as_str()).cmp(&(from, to)))
            .map_or(0, |i| self.edges[i].count)
    }

    pub fn out_degree_total(&self, label: &str) -> u64 {
        self.edges.iter().filter(|e| e.from == label).map(|e| e.count).sum()
    }
}

pub fn build_state_graph(sequences: &[TraceSequence]) -> StateGraph {
    let mut nodes: BTreeMap<String, StateNode> = BTreeMap::new();
    let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
    for s in sequences {
        let labels = s.seq.labels();
        for (i, l) in labels.iter().enumerate() {
            let node = nodes.entry(l.clone()).or_insert_with(|| StateNode {
                label: l.clone(),
                visit_count: 0,
                is_start: false,
                is_end: false,
            });
            node.visit_count += 1;
            node.is_start |= i == 0;
            node.is_end |= i + 1 == labels.len();
        }
        for w in labels.windows(2) {
            *edges.entry((w[0].clone(), w[1].clone())).or_default() += 1;
        }
    }
    StateGraph {
        nodes: nodes.into_values().collect(),
        edges: edges.into_iter().map(|((from, to), count)| StateEdge { from, to, count }).collect(),
    }
}
