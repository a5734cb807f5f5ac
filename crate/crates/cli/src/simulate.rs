//! Synthetic escape-room cohorts.
//!
//! Every player greets the team on joining, then works through the
//! puzzles in order. Adaptable players look at the right cue, skip
//! distractors and rarely press a wrong button. Before each puzzle a
//! player may quit for good.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use teamtrace_core::abstraction::{team_completion_time, AbstractionConfig};
use teamtrace_core::catalog::{ScreenCatalog, ScreenCategory};
use teamtrace_core::model::{EventKind, RawEvent};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub teams: usize,
    pub players_per_team: usize,
    /// Probability-like skill in `[0, 1]`.
    pub adaptability: f64,
    /// Chance of quitting before each puzzle.
    pub attrition: f64,
    /// Chance of a chat message after each step.
    pub chat_intensity: f64,
    pub seed: u64,
    pub puzzles: Vec<String>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            teams: 3,
            players_per_team: 3,
            adaptability: 0.6,
            attrition: 0.1,
            chat_intensity: 0.3,
            seed: 0,
            puzzles: AbstractionConfig::default().puzzle_order,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, p) in [("adaptability", self.adaptability), ("attrition", self.attrition), ("chat_intensity", self.chat_intensity)]
        {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Config(format!("{name} = {p} must be in [0, 1]")));
            }
        }
        if self.teams == 0 || self.players_per_team == 0 {
            return Err(CliError::Config("need at least one team and one player".into()));
        }
        if self.puzzles.is_empty() {
            return Err(CliError::Config("need at least one puzzle".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamCompletion {
    pub team_id: String,
    pub raw_hours: f64,
    pub eggs: u32,
}

#[derive(Debug, Clone)]
pub struct SimulatedCohort {
    pub events: Vec<RawEvent>,
    pub catalog: ScreenCatalog,
    pub completion: Vec<TeamCompletion>,
}

pub const HUB: &str = "hub";
pub const SCOREBOARD: &str = "scoreboard";

pub fn cue_screen(puzzle: &str) -> String {
    format!("cue_{puzzle}")
}

pub fn catalog_for(puzzles: &[String]) -> ScreenCatalog {
    let mut c = ScreenCatalog::default();
    c.insert(HUB, ScreenCategory::Navigation, &[]);
    c.insert(SCOREBOARD, ScreenCategory::Results, &[]);
    for p in puzzles {
        c.insert(cue_screen(p), ScreenCategory::Cue, &[p.as_str()]);
    }
    c
}

struct Clock<'a> {
    now: DateTime<Utc>,
    rng: &'a mut ChaCha8Rng,
}

impl Clock<'_> {
    fn tick(&mut self) -> DateTime<Utc> {
        self.now += Duration::minutes(self.rng.random_range(5..90));
        self.now
    }
}

fn event(ts: DateTime<Utc>, team: &str, player: &str, kind: EventKind, payload: Value) -> RawEvent {
    let Value::Object(map) = payload else { unreachable!("payloads are objects") };
    RawEvent::new(ts, team, player, kind, map).expect("simulated events are valid")
}

fn screen(ts: DateTime<Utc>, team: &str, player: &str, id: &str, rng: &mut ChaCha8Rng) -> RawEvent {
    let secs = (rng.random_range(3.0..120.0f64) * 10.0).round() / 10.0;
    event(ts, team, player, EventKind::ScreenView, json!({ "screen_id": id, "duration_s": secs }))
}

fn simulate_player(spec: &SynthSpec, team: &str, player: &str, start: DateTime<Utc>, rng: &mut ChaCha8Rng) -> Vec<RawEvent> {
    let p = spec.adaptability;
    let mut out = Vec::new();
    let mut clock_rng = ChaCha8Rng::seed_from_u64(rng.random());
    let mut clock = Clock { now: start, rng: &mut clock_rng };
    let chat = |ts, out: &mut Vec<RawEvent>, n: u64| {
        out.push(event(ts, team, player, EventKind::ChatMessage, json!({ "channel": "team", "char_count": n })))
    };
    chat(clock.tick(), &mut out, 12);

    for (i, puzzle) in spec.puzzles.iter().enumerate() {
        if rng.random_bool(spec.attrition) {
            break;
        }
        out.push(screen(clock.tick(), team, player, HUB, rng));
        for _ in 0..2 {
            if rng.random_bool(1.0 - p) {
                let id = if rng.random_bool(0.5) || spec.puzzles.len() == 1 {
                    SCOREBOARD.to_string()
                } else {
                    // a cue for a different puzzle
                    let other = (i + rng.random_range(1..spec.puzzles.len())) % spec.puzzles.len();
                    cue_screen(&spec.puzzles[other])
                };
                out.push(screen(clock.tick(), team, player, &id, rng));
            }
        }
        if rng.random_bool(p) {
            out.push(screen(clock.tick(), team, player, &cue_screen(puzzle), rng));
        }
        let mut fails = 0;
        while fails < 6 && rng.random_bool((1.0 - p) * 0.7) {
            out.push(event(clock.tick(), team, player, EventKind::ButtonPress, json!({ "puzzle_id": puzzle, "correct": false })));
            fails += 1;
        }
        out.push(event(clock.tick(), team, player, EventKind::ButtonPress, json!({ "puzzle_id": puzzle, "correct": true })));
        out.push(event(clock.tick(), team, player, EventKind::PuzzleSolved, json!({ "puzzle_id": puzzle })));
        if rng.random_bool(spec.chat_intensity) {
            let n = rng.random_range(5..140);
            chat(clock.tick(), &mut out, n);
        }
    }
    out
}

/// Deterministic under `spec.seed`. Events are sorted by time, then team
/// and player.
pub fn simulate(spec: &SynthSpec) -> Result<SimulatedCohort, CliError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let base = Utc.with_ymd_and_hms(2024, 3, 1, 9, 0, 0).single().expect("valid date");
    let final_puzzle = spec.puzzles.last().expect("validated");
    let mut events = Vec::new();
    let mut completion = Vec::new();
    for t in 0..spec.teams {
        let team = format!("team{:02}", t + 1);
        let start = base + Duration::days(t as i64);
        let mut team_events = Vec::new();
        for pl in 0..spec.players_per_team {
            let player = format!("p{}", pl + 1);
            team_events.extend(simulate_player(spec, &team, &player, start, &mut rng));
        }
        let end = team_completion_time(&team_events, final_puzzle)
            .or_else(|| team_events.iter().map(RawEvent::ts).max())
            .unwrap_or(start);
        let raw_hours = ((end - start).num_seconds() as f64 / 3600.0 * 1000.0).round() / 1000.0;
        completion.push(TeamCompletion { team_id: team, raw_hours, eggs: rng.random_range(3..=6) });
        events.extend(team_events);
    }
    events.sort_by(|a, b| (a.ts(), a.team_id(), a.player_id()).cmp(&(b.ts(), b.team_id(), b.player_id())));
    Ok(SimulatedCohort { events, catalog: catalog_for(&spec.puzzles), completion })
}

pub fn completion_csv(rows: &[TeamCompletion]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn read_completion_csv(text: &str) -> Result<Vec<TeamCompletion>, CliError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Module(format!("completion CSV: {e}")))
}
