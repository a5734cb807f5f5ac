//! The run configuration file and its command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use teamtrace_bsas::forest::MaxFeatures;
use teamtrace_bsas::infocoll::InfoCollConfig;
use teamtrace_bsas::pipeline::{GridConfig, PipelineConfig};
use teamtrace_core::abstraction::AbstractionConfig;
use teamtrace_core::adaptscore::BandCuts;
use teamtrace_core::distance::{DaedalusPenalties, DistanceConfig, MetricKind, MplWeights};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// JSON-Lines event log.
    pub log: Option<PathBuf>,
    /// Screen catalog (TOML or JSON).
    pub catalog: Option<PathBuf>,
    /// MPL judgments: `team_id,quarter,segment,highest_brand_judgment,target`.
    pub judgments: Option<PathBuf>,
    /// Balanced-scorecard inputs.
    pub scorecard: Option<PathBuf>,
    /// Team completion: `team_id,raw_hours,eggs`.
    pub completion: Option<PathBuf>,
    /// Screen-time features; derived from the log when absent.
    pub features: Option<PathBuf>,
    /// Team performance: `team_id,performance`.
    pub performance: Option<PathBuf>,
    /// Directory of per-team sequence files; `<out>/sequences` when absent.
    pub sequences: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptSettings {
    /// `quartiles`, or three ascending cuts.
    pub bands: Option<[f64; 3]>,
    /// Trace id of an expert-chosen ideal; the designed ideal otherwise.
    pub ideal_trace: Option<String>,
}

impl AdaptSettings {
    pub fn band_cuts(&self) -> BandCuts {
        match self.bands {
            Some(cuts) => BandCuts::Fixed { cuts },
            None => BandCuts::Quartiles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsasSettings {
    pub classes: usize,
    pub test_fraction: f64,
    pub folds: usize,
    pub n_trees: Vec<usize>,
    /// 0 means unlimited depth.
    pub max_depth: Vec<usize>,
    pub min_samples_leaf: Vec<usize>,
    pub max_features: MaxFeatures,
    pub baseline_draws: usize,
    pub info_coll: InfoCollConfig,
}

impl Default for BsasSettings {
    fn default() -> Self {
        let grid = GridConfig::default();
        let pipe = PipelineConfig::default();
        BsasSettings {
            classes: 5,
            test_fraction: pipe.test_fraction,
            folds: pipe.folds,
            n_trees: grid.n_trees,
            max_depth: grid.max_depth.iter().map(|d| d.unwrap_or(0)).collect(),
            min_samples_leaf: grid.min_samples_leaf,
            max_features: grid.max_features,
            baseline_draws: pipe.baseline_draws,
            info_coll: InfoCollConfig::default(),
        }
    }
}

impl BsasSettings {
    pub fn pipeline(&self, seed: u64) -> PipelineConfig {
        PipelineConfig {
            test_fraction: self.test_fraction,
            folds: self.folds,
            grid: GridConfig {
                n_trees: self.n_trees.clone(),
                max_depth: self.max_depth.iter().map(|&d| (d > 0).then_some(d)).collect(),
                min_samples_leaf: self.min_samples_leaf.clone(),
                max_features: self.max_features,
            },
            seed,
            baseline_draws: self.baseline_draws,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeSettings {
    pub port: u16,
    /// Empty allows any origin.
    pub cors_origins: Vec<String>,
}

impl Default for ServeSettings {
    fn default() -> Self {
        ServeSettings { port: 8787, cors_origins: vec!["http://localhost:5173".into()] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Required by stochastic commands.
    pub seed: Option<u64>,
    pub metric: MetricKind,
    pub paths: Paths,
    pub abstraction: AbstractionConfig,
    pub mpl: MplWeights,
    pub daedalus: DaedalusPenalties,
    pub adapt: AdaptSettings,
    pub bsas: BsasSettings,
    pub serve: ServeSettings,
}

impl RunConfig {
    pub fn distance(&self) -> DistanceConfig {
        DistanceConfig { metric: self.metric, mpl: self.mpl.clone(), daedalus: self.daedalus.clone() }
    }

    pub fn defaults_toml() -> String {
        let mut cfg = RunConfig::default();
        cfg.paths.out = PathBuf::from("out");
        toml::to_string_pretty(&cfg).expect("config serializes")
    }

    /// Reads `path` (defaults when `None`), applies `key=value` overrides
    /// with dotted keys, and resolves relative paths against the file's
    /// directory.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let Some(p) = path else { return Self::from_toml_str("", overrides) };
        let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
        let mut cfg = Self::from_toml_str(&text, overrides).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
            other => other,
        })?;
        if let Some(base) = p.parent().filter(|b| !b.as_os_str().is_empty()) {
            cfg.paths.rebase(base);
        }
        Ok(cfg)
    }

    /// Parses and validates a config document; paths are left as written.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let mut cfg: RunConfig = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        if cfg.paths.out.as_os_str().is_empty() {
            cfg.paths.out = PathBuf::from("out");
        }
        cfg.distance().validate().map_err(|errs| {
            CliError::Config(errs.iter().map(|e| format!("{}: {}", e.field, e.message)).collect::<Vec<_>>().join("; "))
        })?;
        cfg.abstraction.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn require_seed(&self, command: &str) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Config(format!("{command} is stochastic and needs a seed (--seed or seed = ...)")))
    }
}

impl Paths {
    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.log,
            &mut self.catalog,
            &mut self.judgments,
            &mut self.scorecard,
            &mut self.completion,
            &mut self.features,
            &mut self.performance,
            &mut self.sequences,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.out);
    }

    pub fn sequences_dir(&self) -> PathBuf {
        self.sequences.clone().unwrap_or_else(|| self.out.join("sequences"))
    }
}

/// `a.b.c=value`; the value is read as a TOML literal, or as a string
/// when it is not one.
pub fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {spec:?} is not key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields one part");
    let mut table = doc;
    for p in parents {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override {key}: {p} is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}
