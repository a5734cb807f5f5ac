//! Screen taxonomy shared by both environments.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::CatalogError;
use crate::model::{Diagnostic, EventBody, ParsedLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenCategory {
    CompetitorsDecisions,
    CompetitorsResults,
    PreviousDecisions,
    CurrentDecisions,
    Results,
    Errors,
    PerformanceVisualization,
    /// A puzzle cue; relevance is decided by `relevant_for`.
    Cue,
    /// Pass-through screen with no information content.
    Navigation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenEntry {
    pub category: ScreenCategory,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub relevant_for: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenCatalog {
    pub screens: BTreeMap<String, ScreenEntry>,
}

impl ScreenCatalog {
    pub fn from_toml_str(s: &str) -> Result<Self, CatalogError> {
        let cat: ScreenCatalog = toml::from_str(s).map_err(|e| CatalogError::Parse(e.to_string()))?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn from_json_str(s: &str) -> Result<Self, CatalogError> {
        let cat: ScreenCatalog =
            serde_json::from_str(s).map_err(|e| CatalogError::Parse(e.to_string()))?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("catalog serializes")
    }

    fn validate(&self) -> Result<(), CatalogError> {
        for (id, e) in &self.screens {
            if e.category != ScreenCategory::Cue && !e.relevant_for.is_empty() {
                return Err(CatalogError::Invalid {
                    screen: id.clone(),
                    detail: "only cue screens may list relevant puzzles".into(),
                });
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, id: impl Into<String>, category: ScreenCategory, relevant_for: &[&str]) {
        self.screens.insert(
            id.into(),
            ScreenEntry { category, relevant_for: relevant_for.iter().map(|s| s.to_string()).collect() },
        );
    }

    pub fn get(&self, screen_id: &str) -> Option<&ScreenEntry> {
        self.screens.get(screen_id)
    }

    /// One diagnostic per screen_view whose screen is not in the catalog.
    pub fn unresolved(&self, log: &ParsedLog) -> Vec<Diagnostic> {
        log.events
            .iter()
            .zip(&log.lines)
            .filter_map(|(e, &line)| match e.body() {
                EventBody::ScreenView { screen_id, .. } if !self.screens.contains_key(screen_id) => {
                    Some(Diagnostic { line, message: format!("unknown screen {screen_id:?}") })
                }
                _ => None,
            })
            .collect()
    }
}
