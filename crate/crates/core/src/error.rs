use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EventError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("bad timestamp {0}")]
    Timestamp(String),
    #[error("unknown event kind {0:?}")]
    UnknownKind(String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}` must be a {expected}")]
    PayloadType { key: &'static str, expected: &'static str },
    #[error("key `{key}` out of range: {detail}")]
    OutOfRange { key: &'static str, detail: String },
    #[error("event of {found} does not belong to trace {owner}")]
    ForeignEvent { owner: String, found: String },
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog parse error: {0}")]
    Parse(String),
    #[error("screen {screen:?}: {detail}")]
    Invalid { screen: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AbstractionError {
    #[error("judgment table is missing quarter Q{quarter} for segment {segment:?}")]
    MissingQuarter { quarter: u8, segment: String },
    #[error("judgment {value} for Q{quarter}/{segment} is outside [0, 100]")]
    JudgmentRange { quarter: u8, segment: String, value: f64 },
    #[error("invalid target set: {0}")]
    Targets(String),
    #[error("invalid abstraction config: {0}")]
    Config(String),
    #[error("screen {0:?} is not in the catalog")]
    UnknownScreen(String),
    #[error("puzzle {0:?} is not in the puzzle order")]
    UnknownPuzzle(String),
    #[error("cannot parse state label {0:?}")]
    Label(String),
    #[error("trace must belong to a single player")]
    NotAPlayerTrace,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistanceError {
    #[error("sequence length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("metric {metric} cannot compare {found} sequences")]
    WrongKind { metric: &'static str, found: &'static str },
    #[error("at least one sequence is required")]
    Empty,
    #[error("invalid weight `{field}`: {detail}")]
    Weight { field: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("cohort is empty")]
    EmptyCohort,
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("missing {what} for segment {segment:?}")]
    MissingSegment { segment: String, what: &'static str },
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    Range { what: String, value: f64, lo: f64, hi: f64 },
    #[error("puzzle {puzzle}: timings violate quickest <= player <= slowest")]
    Timing { puzzle: usize },
    #[error("chat activity undefined: no team member sent a message")]
    NoMessages,
    #[error("unknown player {0:?}")]
    UnknownPlayer(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("toml: {0}")]
    Toml(String),
    #[error("row {row}: {detail}")]
    Row { row: usize, detail: String },
    #[error("{0}")]
    Invalid(String),
}
