//! Canonical event and trace model.
//!
//! Both source games emit heterogeneous telemetry; everything is normalized to
//! one JSON object per line:
//!
//! ```text
//! {"ts":"2018-06-01T10:00:00.000Z","team_id":"t1","player_id":"p1","kind":"screen_view","payload":{"screen_id":"hub","duration_s":4.5}}
//! ```
//!
//! The `kind` decides which payload keys are required. Unknown payload keys
//! are kept verbatim so a parse/serialize cycle never drops information.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::EventError;

/// The closed set of telemetry kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ScreenView,
    ButtonPress,
    ChatMessage,
    PuzzleSolved,
    QuarterDecision,
    QuarterResult,
}

impl EventKind {
    pub const ALL: [EventKind; 6] = [
        EventKind::ScreenView,
        EventKind::ButtonPress,
        EventKind::ChatMessage,
        EventKind::PuzzleSolved,
        EventKind::QuarterDecision,
        EventKind::QuarterResult,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ScreenView => "screen_view",
            EventKind::ButtonPress => "button_press",
            EventKind::ChatMessage => "chat_message",
            EventKind::PuzzleSolved => "puzzle_solved",
            EventKind::QuarterDecision => "quarter_decision",
            EventKind::QuarterResult => "quarter_result",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = EventError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| EventError::UnknownKind(s.to_string()))
    }
}

/// Typed, borrowed view of a validated payload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventBody<'a> {
    ScreenView { screen_id: &'a str, duration_s: f64 },
    ButtonPress { puzzle_id: &'a str, correct: bool },
    ChatMessage { channel: &'a str, char_count: u64 },
    PuzzleSolved { puzzle_id: &'a str },
    QuarterDecision { quarter: u8 },
    QuarterResult { quarter: u8, revenue: f64, expenses: f64 },
}

/// One timestamped telemetry record. Construction validates the payload
/// against the kind, so [`RawEvent::body`] never fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEventRepr", into = "RawEventRepr")]
pub struct RawEvent {
    ts: DateTime<Utc>,
    team_id: String,
    player_id: String,
    kind: EventKind,
    payload: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct RawEventRepr {
    ts: String,
    team_id: String,
    player_id: String,
    kind: String,
    #[serde(default)]
    payload: Map<String, Value>,
}

impl TryFrom<RawEventRepr> for RawEvent {
    type Error = EventError;

    fn try_from(r: RawEventRepr) -> Result<Self, Self::Error> {
        let ts = parse_timestamp(&r.ts)?;
        let kind: EventKind = r.kind.parse()?;
        RawEvent::new(ts, r.team_id, r.player_id, kind, r.payload)
    }
}

impl From<RawEvent> for RawEventRepr {
    fn from(e: RawEvent) -> Self {
        RawEventRepr {
            ts: format_timestamp(&e.ts),
            team_id: e.team_id,
            player_id: e.player_id,
            kind: e.kind.as_str().to_string(),
            payload: e.payload,
        }
    }
}

/// Parses an RFC 3339 timestamp, converts to UTC and truncates to milliseconds.
pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, EventError> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc).trunc_subsecs(3))
        .map_err(|e| EventError::Timestamp(format!("{s:?}: {e}")))
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn req_str<'a>(p: &'a Map<String, Value>, key: &'static str) -> Result<&'a str, EventError> {
    match p.get(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(EventError::PayloadType { key, expected: "string" }),
        None => Err(EventError::MissingKey(key)),
    }
}

fn req_f64(p: &Map<String, Value>, key: &'static str) -> Result<f64, EventError> {
    match p.get(key) {
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|v| v.is_finite())
            .ok_or(EventError::PayloadType { key, expected: "finite number" }),
        Some(_) => Err(EventError::PayloadType { key, expected: "number" }),
        None => Err(EventError::MissingKey(key)),
    }
}

fn req_u64(p: &Map<String, Value>, key: &'static str) -> Result<u64, EventError> {
    match p.get(key) {
        Some(Value::Number(n)) => n
            .as_u64()
            .ok_or(EventError::PayloadType { key, expected: "non-negative integer" }),
        Some(_) => Err(EventError::PayloadType { key, expected: "non-negative integer" }),
        None => Err(EventError::MissingKey(key)),
    }
}

fn req_bool(p: &Map<String, Value>, key: &'static str) -> Result<bool, EventError> {
    match p.get(key) {
        Some(Value::Bool(b)) => Ok(*b),
        Some(_) => Err(EventError::PayloadType { key, expected: "boolean" }),
        None => Err(EventError::MissingKey(key)),
    }
}

fn req_quarter(p: &Map<String, Value>) -> Result<u8, EventError> {
    let q = req_u64(p, "quarter")?;
    if (1..=6).contains(&q) {
        Ok(q as u8)
    } else {
        Err(EventError::OutOfRange { key: "quarter", detail: format!("{q} not in 1..=6") })
    }
}

fn body_of(kind: EventKind, p: &Map<String, Value>) -> Result<EventBody<'_>, EventError> {
    Ok(match kind {
        EventKind::ScreenView => {
            let duration_s = req_f64(p, "duration_s")?;
            if duration_s < 0.0 {
                return Err(EventError::OutOfRange {
                    key: "duration_s",
                    detail: format!("{duration_s} < 0"),
                });
            }
            EventBody::ScreenView { screen_id: req_str(p, "screen_id")?, duration_s }
        }
        EventKind::ButtonPress => EventBody::ButtonPress {
            puzzle_id: req_str(p, "puzzle_id")?,
            correct: req_bool(p, "correct")?,
        },
        EventKind::ChatMessage => EventBody::ChatMessage {
            channel: req_str(p, "channel")?,
            char_count: req_u64(p, "char_count")?,
        },
        EventKind::PuzzleSolved => EventBody::PuzzleSolved { puzzle_id: req_str(p, "puzzle_id")? },
        EventKind::QuarterDecision => EventBody::QuarterDecision { quarter: req_quarter(p)? },
        EventKind::QuarterResult => EventBody::QuarterResult {
            quarter: req_quarter(p)?,
            revenue: req_f64(p, "revenue")?,
            expenses: req_f64(p, "expenses")?,
        },
    })
}

impl RawEvent {
    pub fn new(
        ts: DateTime<Utc>,
        team_id: impl Into<String>,
        player_id: impl Into<String>,
        kind: EventKind,
        payload: Map<String, Value>,
    ) -> Result<Self, EventError> {
        let team_id = team_id.into();
        let player_id = player_id.into();
        if team_id.is_empty() {
            return Err(EventError::MissingKey("team_id"));
        }
        if player_id.is_empty() {
            return Err(EventError::MissingKey("player_id"));
        }
        body_of(kind, &payload)?;
        Ok(RawEvent { ts: ts.trunc_subsecs(3), team_id, player_id, kind, payload })
    }

    pub fn ts(&self) -> DateTime<Utc> {
        self.ts
    }

    pub fn team_id(&self) -> &str {
        &self.team_id
    }

    pub fn player_id(&self) -> &str {
        &self.player_id
    }

    pub fn kind(&self) -> EventKind {
        self.kind
    }

    pub fn payload(&self) -> &Map<String, Value> {
        &self.payload
    }

    pub fn body(&self) -> EventBody<'_> {
        body_of(self.kind, &self.payload).expect("payload validated at construction")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event serialization is infallible")
    }
}

/// A rejected input line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// 1-based line number.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedLog {
    pub events: Vec<RawEvent>,
    /// Source line of each entry in `events`.
    pub lines: Vec<usize>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses a single JSON-Lines record.
pub fn parse_event_line(line: &str) -> Result<RawEvent, EventError> {
    let repr: RawEventRepr =
        serde_json::from_str(line).map_err(|e| EventError::Json(e.to_string()))?;
    RawEvent::try_from(repr)
}

/// Reads a JSON-Lines event log. Malformed lines become diagnostics; only a
/// failing reader is fatal. Blank lines are skipped silently.
pub fn parse_event_log<R: BufRead>(mut reader: R) -> std::io::Result<ParsedLog> {
    let mut out = ParsedLog::default();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let text = match std::str::from_utf8(&buf) {
            Ok(t) => t.trim(),
            Err(e) => {
                out.diagnostics.push(Diagnostic { line: line_no, message: format!("invalid UTF-8: {e}") });
                continue;
            }
        };
        if text.is_empty() {
            continue;
        }
        match parse_event_line(text) {
            Ok(ev) => {
                out.events.push(ev);
                out.lines.push(line_no);
            }
            Err(e) => out.diagnostics.push(Diagnostic { line: line_no, message: e.to_string() }),
        }
    }
    Ok(out)
}

pub fn to_jsonl(events: &[RawEvent]) -> String {
    let mut s = String::new();
    for e in events {
        s.push_str(&e.to_json_line());
        s.push('\n');
    }
    s
}

/// Whose events a trace holds. `player_id == None` marks a team-level trace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TraceOwner {
    pub team_id: String,
    pub player_id: Option<String>,
}

impl TraceOwner {
    pub fn player(team_id: impl Into<String>, player_id: impl Into<String>) -> Self {
        TraceOwner { team_id: team_id.into(), player_id: Some(player_id.into()) }
    }

    pub fn team(team_id: impl Into<String>) -> Self {
        TraceOwner { team_id: team_id.into(), player_id: None }
    }

    /// `team/player`, or just `team` for team-level traces.
    pub fn trace_id(&self) -> String {
        match &self.player_id {
            Some(p) => format!("{}/{}", self.team_id, p),
            None => self.team_id.clone(),
        }
    }
}

/// Time-ordered events of one owner.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    owner: TraceOwner,
    events: Vec<RawEvent>,
}

impl Trace {
    /// Stable-sorts the events by timestamp. Fails if any event belongs to
    /// another team (or another player, for player traces).
    pub fn new(owner: TraceOwner, mut events: Vec<RawEvent>) -> Result<Self, EventError> {
        for e in &events {
            let foreign = e.team_id != owner.team_id
                || owner.player_id.as_deref().is_some_and(|p| p != e.player_id);
            if foreign {
                return Err(EventError::ForeignEvent {
                    owner: owner.trace_id(),
                    found: format!("{}/{}", e.team_id, e.player_id),
                });
            }
        }
        events.sort_by_key(|e| e.ts);
        Ok(Trace { owner, events })
    }

    pub fn owner(&self) -> &TraceOwner {
        &self.owner
    }

    pub fn id(&self) -> String {
        self.owner.trace_id()
    }

    pub fn events(&self) -> &[RawEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last_ts(&self) -> Option<DateTime<Utc>> {
        self.events.last().map(|e| e.ts)
    }
}

/// Groups events by `(team_id, player_id)`; each trace is stably time-sorted.
pub fn partition_traces(events: &[RawEvent]) -> BTreeMap<(String, String), Trace> {
    let mut groups: BTreeMap<(String, String), Vec<RawEvent>> = BTreeMap::new();
    for e in events {
        groups.entry((e.team_id.clone(), e.player_id.clone())).or_default().push(e.clone());
    }
    groups
        .into_iter()
        .map(|((team, player), evs)| {
            let owner = TraceOwner::player(team.clone(), player.clone());
            let trace = Trace::new(owner, evs).expect("grouped by owner");
            ((team, player), trace)
        })
        .collect()
}

/// All events of each team, time-sorted, as team-level traces.
pub fn partition_teams(events: &[RawEvent]) -> BTreeMap<String, Trace> {
    let mut groups: BTreeMap<String, Vec<RawEvent>> = BTreeMap::new();
    for e in events {
        groups.entry(e.team_id.clone()).or_default().push(e.clone());
    }
    groups
        .into_iter()
        .map(|(team, evs)| {
            let trace = Trace::new(TraceOwner::team(team.clone()), evs).expect("grouped by team");
            (team, trace)
        })
        .collect()
}
