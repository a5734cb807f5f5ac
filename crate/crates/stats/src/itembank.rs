//! The team-process item bank in both released versions.

use serde::{Deserialize, Serialize};

use crate::error::StatsError;

const V1: &str = include_str!("../data/tag_v1.csv");
const V2: &str = include_str!("../data/tag_v2.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BankVersion {
    V1,
    V2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub label: String,
    pub item: String,
    /// Scale from the source framework (PF, PE, SA, TL).
    pub rosen_scale: String,
    /// Factor code (GS, TP, FB); absent when the item loads on none.
    #[serde(default, deserialize_with = "empty_as_none")]
    pub tag_scale: Option<String>,
}

fn empty_as_none<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    Ok(s.filter(|s| !s.trim().is_empty()))
}

pub fn factor_name(code: &str) -> Option<&'static str> {
    match code {
        "GS" => Some("Game Strategy"),
        "TP" => Some("Team Planning"),
        "FB" => Some("Feedback"),
        _ => None,
    }
}

pub fn item_bank(version: BankVersion) -> Result<Vec<Item>, StatsError> {
    let src = match version {
        BankVersion::V1 => V1,
        BankVersion::V2 => V2,
    };
    let mut rdr = csv::Reader::from_reader(src.as_bytes());
    Ok(rdr.deserialize().collect::<Result<Vec<Item>, _>>()?)
}
