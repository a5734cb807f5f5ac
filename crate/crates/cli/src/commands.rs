//! One function per subcommand. Each reads its inputs from the resolved
//! config, writes under `paths.out` and records a manifest.

use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Serialize;
use teamtrace_bsas::binning::equal_frequency_bin;
use teamtrace_bsas::features::{quarter_slices, FeatureMatrix};
use teamtrace_bsas::infocoll::{info_coll_cohort, normalize_importances};
use teamtrace_bsas::pipeline::run_pipeline;
use teamtrace_core::abstraction::{abstract_daedalus_team, abstract_mpl, read_judgment_csv};
use teamtrace_core::adaptscore::{adaptation_scores, scores_to_csv, IdealTrace};
use teamtrace_core::catalog::ScreenCatalog;
use teamtrace_core::distance::{pairwise_matrix, MetricKind};
use teamtrace_core::model::{parse_event_log, partition_traces, to_jsonl, ParsedLog, RawEvent};
use teamtrace_core::perfscore::{
    individual_scores, read_scorecard_csv, team_score_norm, team_time_score, IndividualMix, TeamActivity,
};
use teamtrace_core::states::{SequenceFile, TraceSequence};
use teamtrace_layout::document::{LayoutInputs, PerformanceRow};
use teamtrace_layout::service::AppState;
use teamtrace_layout::analyze;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::{FileHash, Outputs};
use crate::simulate::{completion_csv, read_completion_csv, simulate, SynthSpec};

fn require<'a>(p: &'a Option<PathBuf>, what: &'static str, key: &str) -> Result<&'a Path, CliError> {
    let p = p.as_deref().ok_or_else(|| CliError::Config(format!("no {what} given (set paths.{key})")))?;
    if !p.exists() {
        return Err(CliError::Missing { path: p.to_path_buf(), what });
    }
    Ok(p)
}

fn read_text(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))
}

pub fn load_log(p: &Path) -> Result<ParsedLog, CliError> {
    let f = std::fs::File::open(p).map_err(|e| CliError::io(p, e))?;
    let log = parse_event_log(BufReader::new(f)).map_err(|e| CliError::io(p, e))?;
    for d in &log.diagnostics {
        eprintln!("warning: {}: {d}", p.display());
    }
    Ok(log)
}

pub fn load_catalog(p: &Path) -> Result<ScreenCatalog, CliError> {
    let text = read_text(p)?;
    let parsed = if p.extension().is_some_and(|e| e == "json") {
        ScreenCatalog::from_json_str(&text)
    } else {
        ScreenCatalog::from_toml_str(&text)
    };
    parsed.map_err(|e| CliError::Module(format!("{}: {e}", p.display())))
}

fn file_stem(team: &str) -> String {
    team.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

/// Every sequence in `dir`, files in name order.
pub fn load_sequences(dir: &Path) -> Result<(Vec<TraceSequence>, Vec<PathBuf>), CliError> {
    if !dir.is_dir() {
        return Err(CliError::Missing { path: dir.to_path_buf(), what: "sequence directory (run `abstract` first)" });
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    let mut traces = Vec::new();
    for f in &files {
        let file = SequenceFile::from_json_str(&read_text(f)?)
            .map_err(|e| CliError::Module(format!("{}: {e}", f.display())))?;
        traces.extend(file.sequences);
    }
    if traces.is_empty() {
        return Err(CliError::Missing { path: dir.to_path_buf(), what: "sequence files" });
    }
    Ok((traces, files))
}

fn csv_string<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct TraceRow {
    trace_id: String,
    team_id: String,
    player_id: String,
    events: usize,
    first_ts: String,
    last_ts: String,
}

pub fn ingest(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let log_path = require(&cfg.paths.log, "event log", "log")?;
    let log = load_log(log_path)?;
    let mut inputs = vec![log_path.to_path_buf()];
    let mut diagnostics = log.diagnostics.clone();
    if cfg.paths.catalog.is_some() {
        let cat_path = require(&cfg.paths.catalog, "screen catalog", "catalog")?;
        let catalog = load_catalog(cat_path)?;
        inputs.push(cat_path.to_path_buf());
        diagnostics.extend(catalog.unresolved(&log));
    }
    let rows: Vec<TraceRow> = partition_traces(&log.events)
        .into_iter()
        .map(|((team, player), t)| TraceRow {
            trace_id: t.id(),
            team_id: team,
            player_id: player,
            events: t.events().len(),
            first_ts: t.events().first().map(|e| teamtrace_core::model::format_timestamp(&e.ts())).unwrap_or_default(),
            last_ts: t.last_ts().map(|ts| teamtrace_core::model::format_timestamp(&ts)).unwrap_or_default(),
        })
        .collect();
    let mut out = Outputs::new(&cfg.paths.out);
    out.write("events.jsonl", to_jsonl(&log.events))?;
    out.write("traces.csv", csv_string(&rows))?;
    out.write("diagnostics.json", pretty(&diagnostics))?;
    eprintln!("{} events, {} traces, {} diagnostics", log.events.len(), rows.len(), diagnostics.len());
    out.finish("ingest", cfg, &inputs)
}

pub fn abstract_sequences(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let mut files: BTreeMap<String, SequenceFile> = BTreeMap::new();
    let mut inputs = Vec::new();
    match cfg.metric {
        MetricKind::Daedalus => {
            let log_path = require(&cfg.paths.log, "event log", "log")?;
            let cat_path = require(&cfg.paths.catalog, "screen catalog", "catalog")?;
            let log = load_log(log_path)?;
            let catalog = load_catalog(cat_path)?;
            inputs.extend([log_path.to_path_buf(), cat_path.to_path_buf()]);
            let traces = partition_traces(&log.events);
            let mut by_team: BTreeMap<&str, Vec<&teamtrace_core::model::Trace>> = BTreeMap::new();
            for ((team, _), t) in &traces {
                by_team.entry(team.as_str()).or_default().push(t);
            }
            for (team, members) in by_team {
                let team_events: Vec<RawEvent> = log.events.iter().filter(|e| e.team_id() == team).cloned().collect();
                let sequences = abstract_daedalus_team(&members, &team_events, &catalog, &cfg.abstraction)
                    .map_err(|e| CliError::Module(format!("team {team}: {e}")))?;
                files.insert(team.to_string(), SequenceFile { team_id: team.to_string(), sequences });
            }
        }
        MetricKind::Mpl => {
            let j_path = require(&cfg.paths.judgments, "judgment table", "judgments")?;
            inputs.push(j_path.to_path_buf());
            let f = std::fs::File::open(j_path).map_err(|e| CliError::io(j_path, e))?;
            let teams = read_judgment_csv(f).map_err(|e| CliError::Module(format!("{}: {e}", j_path.display())))?;
            for (team, j) in teams {
                let states = abstract_mpl(&j.table, &j.targets, &cfg.abstraction)
                    .map_err(|e| CliError::Module(format!("team {team}: {e}")))?;
                let sequences = vec![TraceSequence::mpl(team.clone(), states)];
                files.insert(team.clone(), SequenceFile { team_id: team, sequences });
            }
        }
    }
    if files.is_empty() {
        return Err(CliError::Module("no teams found in the input".into()));
    }
    let dir = cfg.paths.sequences_dir();
    // stale files from an earlier, larger cohort would otherwise be read back
    if dir.is_dir() {
        for e in std::fs::read_dir(&dir).map_err(|e| CliError::io(&dir, e))?.flatten() {
            if e.path().extension().is_some_and(|x| x == "json") {
                std::fs::remove_file(e.path()).map_err(|err| CliError::io(&e.path(), err))?;
            }
        }
    }
    let mut out = Outputs::new(&cfg.paths.out);
    // relative to the output root when inside it, absolute otherwise
    let base = dir.strip_prefix(&cfg.paths.out).map(Path::to_path_buf).unwrap_or_else(|_| dir.clone());
    for (team, file) in &files {
        out.write(base.join(format!("{}.json", file_stem(team))), file.to_json_pretty())?;
    }
    eprintln!("{} sequence files in {}", files.len(), dir.display());
    out.finish("abstract", cfg, &inputs)
}

pub fn distance(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let (traces, inputs) = load_sequences(&cfg.paths.sequences_dir())?;
    let m = pairwise_matrix(&traces, &cfg.distance()).map_err(CliError::module)?;
    let mut out = Outputs::new(&cfg.paths.out);
    out.write("distances.csv", m.to_csv())?;
    out.write("distances.json", m.to_json())?;
    out.finish("distance", cfg, &inputs)
}

pub fn ideal_for(cfg: &RunConfig, traces: &[TraceSequence]) -> Result<IdealTrace, CliError> {
    match &cfg.adapt.ideal_trace {
        Some(id) => traces
            .iter()
            .find(|t| &t.id == id)
            .map(IdealTrace::from_trace)
            .ok_or_else(|| CliError::Config(format!("ideal trace {id} is not in the corpus"))),
        None => Ok(match cfg.metric {
            MetricKind::Mpl => IdealTrace::mpl_default(),
            MetricKind::Daedalus => IdealTrace::daedalus_default(&cfg.abstraction.puzzle_order),
        }),
    }
}

pub fn adapt_score(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let (traces, inputs) = load_sequences(&cfg.paths.sequences_dir())?;
    let ideal = ideal_for(cfg, &traces)?;
    let scores =
        adaptation_scores(&traces, &ideal, &cfg.distance(), &cfg.adapt.band_cuts()).map_err(CliError::module)?;
    let mut out = Outputs::new(&cfg.paths.out);
    out.write("scores.csv", scores_to_csv(&scores))?;
    out.finish("adapt-score", cfg, &inputs)
}

#[derive(Serialize)]
struct ScorecardRow {
    team_id: String,
    quarter: u8,
    fp: f64,
    mp: f64,
    me: f64,
    bs: f64,
    cbs: f64,
}

#[derive(Serialize)]
struct TeamTimeRow {
    team_id: String,
    raw_hours: f64,
    eggs: u32,
    adjusted_hours: f64,
    team_score_norm: f64,
}

pub fn perf_score(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let mut out = Outputs::new(&cfg.paths.out);
    let mut inputs = Vec::new();
    if cfg.paths.scorecard.is_none() && cfg.paths.completion.is_none() {
        return Err(CliError::Config("perf-score needs paths.scorecard or paths.completion".into()));
    }
    if cfg.paths.scorecard.is_some() {
        let p = require(&cfg.paths.scorecard, "scorecard table", "scorecard")?;
        inputs.push(p.to_path_buf());
        let f = std::fs::File::open(p).map_err(|e| CliError::io(p, e))?;
        let cards = read_scorecard_csv(f).map_err(|e| CliError::Module(format!("{}: {e}", p.display())))?;
        let rows: Vec<ScorecardRow> = cards
            .into_iter()
            .flat_map(|(team, cs)| {
                cs.into_iter().map(move |c| ScorecardRow {
                    team_id: team.clone(),
                    quarter: c.quarter,
                    fp: c.fp,
                    mp: c.mp,
                    me: c.me,
                    bs: c.bs,
                    cbs: c.cbs,
                })
            })
            .collect();
        out.write("scorecards.csv", csv_string(&rows))?;
    }
    if cfg.paths.completion.is_some() {
        let p = require(&cfg.paths.completion, "completion table", "completion")?;
        inputs.push(p.to_path_buf());
        let teams = read_completion_csv(&read_text(p)?)?;
        let timed = teams
            .iter()
            .map(|t| team_time_score(t.raw_hours, t.eggs).map_err(|e| CliError::Module(format!("team {}: {e}", t.team_id))))
            .collect::<Result<Vec<_>, _>>()?;
        let norms = team_score_norm(&timed.iter().map(|t| t.adjusted).collect::<Vec<_>>());
        let rows: Vec<TeamTimeRow> = teams
            .iter()
            .zip(&timed)
            .zip(&norms)
            .map(|((t, s), n)| TeamTimeRow {
                team_id: t.team_id.clone(),
                raw_hours: s.raw_completion,
                eggs: s.eggs_hatched,
                adjusted_hours: s.adjusted,
                team_score_norm: *n,
            })
            .collect();
        out.write("team_times.csv", csv_string(&rows))?;

        if cfg.paths.log.is_some() {
            let lp = require(&cfg.paths.log, "event log", "log")?;
            inputs.push(lp.to_path_buf());
            let log = load_log(lp)?;
            let mut activity: BTreeMap<String, Vec<RawEvent>> = BTreeMap::new();
            for e in log.events {
                activity.entry(e.team_id().to_string()).or_default().push(e);
            }
            let acts: BTreeMap<String, TeamActivity> =
                activity.iter().map(|(t, evs)| (t.clone(), TeamActivity::from_events(evs))).collect();
            let adjusted: BTreeMap<String, f64> =
                teams.iter().zip(&timed).map(|(t, s)| (t.team_id.clone(), s.adjusted)).collect();
            let scores = individual_scores(&acts, &adjusted, &cfg.abstraction.puzzle_order, &IndividualMix::default())
                .map_err(CliError::module)?;
            out.write("individual_scores.csv", csv_string(&scores))?;
        }
    }
    out.finish("perf-score", cfg, &inputs)
}

fn read_performance(p: &Path) -> Result<BTreeMap<String, f64>, CliError> {
    #[derive(serde::Deserialize)]
    struct Row {
        team_id: String,
        performance: f64,
    }
    let text = read_text(p)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for r in rdr.deserialize::<Row>() {
        let r = r.map_err(|e| CliError::Module(format!("{}: {e}", p.display())))?;
        out.insert(r.team_id, r.performance);
    }
    Ok(out)
}

#[derive(Serialize)]
struct InfoCollRow {
    team_id: String,
    quarter: Option<u8>,
    info_coll: f64,
}

pub fn bsas(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let seed = cfg.require_seed("bsas")?;
    let perf_path = require(&cfg.paths.performance, "team performance table", "performance")?;
    let mut inputs = vec![perf_path.to_path_buf()];
    let performance = read_performance(perf_path)?;
    let log = match &cfg.paths.log {
        Some(_) => {
            let p = require(&cfg.paths.log, "event log", "log")?;
            inputs.push(p.to_path_buf());
            Some(load_log(p)?)
        }
        None => None,
    };
    let matrix = match (&cfg.paths.features, &log) {
        (Some(_), _) => {
            let p = require(&cfg.paths.features, "feature matrix", "features")?;
            inputs.push(p.to_path_buf());
            FeatureMatrix::from_csv(read_text(p)?.as_bytes()).map_err(CliError::module)?
        }
        (None, Some(log)) => FeatureMatrix::from_events(&log.events, None),
        (None, None) => return Err(CliError::Config("bsas needs paths.features or paths.log".into())),
    };
    let y_raw = matrix
        .teams
        .iter()
        .map(|t| performance.get(t).copied().ok_or_else(|| CliError::Module(format!("no performance value for team {t}"))))
        .collect::<Result<Vec<f64>, _>>()?;
    let (bins, labels) = equal_frequency_bin(&y_raw, cfg.bsas.classes).map_err(CliError::module)?;
    let report = run_pipeline(&matrix.rows, &labels, cfg.bsas.classes, &cfg.bsas.pipeline(seed)).map_err(CliError::module)?;

    let weights = normalize_importances(&report.importances).map_err(CliError::module)?;
    let mut rows: Vec<InfoCollRow> = info_coll_cohort(&matrix, &weights, &cfg.bsas.info_coll, None)
        .map_err(CliError::module)?
        .into_iter()
        .map(|(team_id, v)| InfoCollRow { team_id, quarter: None, info_coll: v })
        .collect();
    if let Some(log) = &log {
        let global = matrix.column_means();
        for (q, slice) in quarter_slices(&log.events) {
            let m = FeatureMatrix::from_events(&slice, Some(&matrix.features));
            let vals = info_coll_cohort(&m, &weights, &cfg.bsas.info_coll, Some(&global)).map_err(CliError::module)?;
            rows.extend(vals.into_iter().map(|(team_id, v)| InfoCollRow { team_id, quarter: Some(q), info_coll: v }));
        }
    }

    let mut summary = serde_json::to_value(&report).expect("report serializes");
    summary.as_object_mut().expect("object").remove("model");
    summary["features"] = serde_json::to_value(&matrix.features).expect("strings");
    summary["classes"] = serde_json::to_value(&bins).expect("bins serialize");
    let mut out = Outputs::new(&cfg.paths.out);
    out.write("bsas_report.json", pretty(&summary))?;
    out.write("bsas_model.json", pretty(&report.model))?;
    out.write("info_coll.csv", csv_string(&rows))?;
    eprintln!(
        "test macro-F1 {:.3} vs baseline {:.3}; best {:?}",
        report.test.macro_f1, report.baseline_macro_f1, report.best
    );
    out.finish("bsas", cfg, &inputs)
}

/// Corpus, ideal, annotations and raw events for the layout and server.
pub fn layout_inputs(cfg: &RunConfig) -> Result<(LayoutInputs, Vec<PathBuf>), CliError> {
    let (traces, mut inputs) = load_sequences(&cfg.paths.sequences_dir())?;
    let ideal = ideal_for(cfg, &traces)?;
    let mut li = LayoutInputs::new(traces, ideal);
    li.bands = cfg.adapt.band_cuts();
    if cfg.paths.performance.is_some() {
        let p = require(&cfg.paths.performance, "team performance table", "performance")?;
        inputs.push(p.to_path_buf());
        let perf = read_performance(p)?;
        li.annotation = Some("performance".into());
        for t in &li.traces {
            let team = t.id.split('/').next().unwrap_or(&t.id);
            if let Some(v) = perf.get(&t.id).or_else(|| perf.get(team)) {
                li.annotations.insert(t.id.clone(), *v);
            }
        }
        li.performance =
            perf.into_iter().map(|(id, value)| PerformanceRow { id, metric: "performance".into(), value }).collect();
    }
    if cfg.paths.log.is_some() {
        let p = require(&cfg.paths.log, "event log", "log")?;
        inputs.push(p.to_path_buf());
        for ((team, player), t) in partition_traces(&load_log(p)?.events) {
            let key = if cfg.metric == MetricKind::Mpl { team } else { format!("{team}/{player}") };
            li.events.entry(key).or_default().extend(t.events().iter().cloned());
        }
        for evs in li.events.values_mut() {
            evs.sort_by_key(RawEvent::ts);
        }
    }
    Ok((li, inputs))
}

pub fn layout(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let (li, inputs) = layout_inputs(cfg)?;
    let a = analyze(&li, &cfg.distance(), 1).map_err(CliError::module)?;
    let mut out = Outputs::new(&cfg.paths.out);
    out.write("layout.json", pretty(&a.document))?;
    out.finish("layout", cfg, &inputs)
}

pub fn serve(cfg: &RunConfig, bind: Option<std::net::IpAddr>) -> Result<(), CliError> {
    let (li, _) = layout_inputs(cfg)?;
    let state = AppState::new(li, &cfg.distance()).map_err(CliError::module)?;
    let addr = std::net::SocketAddr::new(bind.unwrap_or([127, 0, 0, 1].into()), cfg.serve.port);
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Module(format!("runtime: {e}")))?;
    eprintln!("serving on http://{addr}/api/layout");
    rt.block_on(teamtrace_layout::service::serve(addr, state, &cfg.serve.cors_origins))
        .map_err(|e| CliError::Module(format!("server on {addr}: {e}")))
}

pub fn run_simulation(cfg: &RunConfig, spec: &SynthSpec) -> Result<Vec<FileHash>, CliError> {
    let cohort = simulate(spec)?;
    let mut out = Outputs::new(&cfg.paths.out);
    out.write("events.jsonl", to_jsonl(&cohort.events))?;
    out.write("catalog.toml", cohort.catalog.to_toml_string())?;
    out.write("completion.csv", completion_csv(&cohort.completion))?;
    out.write("synth_spec.json", pretty(spec))?;
    out.finish("simulate", cfg, &[])
}

/// abstract, distance, adapt-score and layout, then perf-score and bsas
/// when their inputs are configured.
pub fn pipeline(cfg: &RunConfig) -> Result<Vec<FileHash>, CliError> {
    let mut all = Vec::new();
    all.extend(abstract_sequences(cfg)?);
    all.extend(distance(cfg)?);
    all.extend(adapt_score(cfg)?);
    all.extend(layout(cfg)?);
    if cfg.paths.scorecard.is_some() || cfg.paths.completion.is_some() {
        all.extend(perf_score(cfg)?);
    }
    if cfg.paths.performance.is_some() && cfg.seed.is_some() && (cfg.paths.features.is_some() || cfg.paths.log.is_some()) {
        all.extend(bsas(cfg)?);
    }
    Ok(all)
}
