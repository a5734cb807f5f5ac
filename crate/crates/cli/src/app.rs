use std::ffi::OsString;
use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use teamtrace_stats::pca::Rotation;

use crate::analysis::{stats, StatKind, StatRequest};
use crate::commands;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::simulate::SynthSpec;

#[derive(Debug, Parser)]
#[command(name = "teamtrace", version, about = "Adaptation analysis of team play traces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set daedalus.failed_disparity=2`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["mpl", "daedalus"])]
    metric: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate an event log and split it into traces.
    Ingest,
    /// Turn traces or judgment tables into symbolic state sequences.
    Abstract,
    /// Pairwise distances between every sequence.
    Distance,
    /// Distance to the ideal trace, score and band for every sequence.
    AdaptScore,
    /// Scorecards, adjusted team times and individual scores.
    PerfScore,
    /// Fit the situation-assessment classifier and score information collection.
    Bsas,
    /// Survey and rating statistics.
    Stats(StatsArgs),
    /// Write the layout document for the visualization.
    Layout,
    /// Serve the layout over HTTP.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        bind: Option<IpAddr>,
    },
    /// Generate a synthetic cohort.
    Simulate(SimArgs),
    /// Configuration helpers.
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
    /// abstract, distance, adapt-score and layout in one go, plus perf-score
    /// and bsas when their inputs are configured.
    Run,
}

#[derive(Debug, Subcommand)]
enum ConfigAction {
    /// Print the default configuration.
    Defaults,
    /// Print the configuration after overrides.
    Show,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(value_enum)]
    kind: StatKind,
    /// CSV input.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated survey items (all items when omitted).
    #[arg(long, value_delimiter = ',')]
    items: Vec<String>,
    #[arg(long, default_value_t = 3)]
    factors: usize,
    #[arg(long)]
    varimax: bool,
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long, default_value_t = 3)]
    teams: usize,
    #[arg(long, default_value_t = 3)]
    players: usize,
    #[arg(long, default_value_t = 0.6)]
    adaptability: f64,
    #[arg(long, default_value_t = 0.1)]
    attrition: f64,
    #[arg(long, default_value_t = 0.3)]
    chat_intensity: f64,
}

fn resolve(g: &Global) -> Result<RunConfig, CliError> {
    let mut overrides = g.overrides.clone();
    if let Some(s) = g.seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(m) = &g.metric {
        overrides.push(format!("metric=\"{m}\""));
    }
    let mut cfg = RunConfig::load(g.config.as_deref(), &overrides)?;
    if let Some(out) = &g.out {
        cfg.paths.out = out.clone();
    }
    Ok(cfg)
}

fn report(files: &[crate::manifest::FileHash], cfg: &RunConfig) {
    for f in files {
        println!("{}", cfg.paths.out.join(&f.path).display());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Command::Config { action: ConfigAction::Defaults } = cli.command {
        print!("{}", RunConfig::defaults_toml());
        return Ok(());
    }
    let mut cfg = resolve(&cli.global)?;
    let files = match cli.command {
        Command::Ingest => commands::ingest(&cfg)?,
        Command::Abstract => commands::abstract_sequences(&cfg)?,
        Command::Distance => commands::distance(&cfg)?,
        Command::AdaptScore => commands::adapt_score(&cfg)?,
        Command::PerfScore => commands::perf_score(&cfg)?,
        Command::Bsas => commands::bsas(&cfg)?,
        Command::Layout => commands::layout(&cfg)?,
        Command::Run => commands::pipeline(&cfg)?,
        Command::Stats(a) => {
            let columns = match (a.x, a.y) {
                (Some(x), Some(y)) => Some((x, y)),
                (None, None) => None,
                _ => return Err(CliError::Usage("--x and --y go together".into())),
            };
            let req = StatRequest {
                input: a.input,
                items: a.items,
                factors: a.factors,
                rotation: if a.varimax { Rotation::Varimax } else { Rotation::None },
                confidence: a.confidence,
                columns,
            };
            let (files, text) = stats(&cfg, a.kind, &req)?;
            println!("{text}");
            files
        }
        Command::Serve { port, bind } => {
            if let Some(p) = port {
                cfg.serve.port = p;
            }
            return commands::serve(&cfg, bind);
        }
        Command::Simulate(a) => {
            let spec = SynthSpec {
                teams: a.teams,
                players_per_team: a.players,
                adaptability: a.adaptability,
                attrition: a.attrition,
                chat_intensity: a.chat_intensity,
                seed: cfg.require_seed("simulate")?,
                ..Default::default()
            };
            commands::run_simulation(&cfg, &spec)?
        }
        Command::Config { action: ConfigAction::Show } => {
            print!("{}", toml::to_string_pretty(&cfg).expect("config serializes"));
            return Ok(());
        }
        Command::Config { action: ConfigAction::Defaults } => unreachable!("handled above"),
    };
    report(&files, &cfg);
    Ok(())
}

/// Parses `args` and runs the command. Returns the process exit code:
/// 0 on success, 2 on usage errors, 1 otherwise.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
