//! The `stats` subcommand: survey and rating analyses on CSV input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use teamtrace_stats::agreement::{fleiss_kappa, RatingTable};
use teamtrace_stats::correlation::pearson;
use teamtrace_stats::histogram::likert_summary;
use teamtrace_stats::pca::{pca, Rotation};
use teamtrace_stats::rank::mann_whitney;
use teamtrace_stats::reliability::cronbach_alpha;
use teamtrace_stats::survey::SurveyMatrix;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::{FileHash, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatKind {
    /// Cronbach's alpha over survey items.
    Alpha,
    /// Fleiss' kappa over an item-by-category count table.
    Kappa,
    /// Two-group rank test on `group,value` rows.
    MannWhitney,
    /// Correlation between two numeric columns.
    Pearson,
    /// Principal components of survey items.
    Pca,
    /// Per-item response histograms.
    Likert,
}

impl StatKind {
    pub fn name(self) -> &'static str {
        match self {
            StatKind::Alpha => "alpha",
            StatKind::Kappa => "kappa",
            StatKind::MannWhitney => "mann-whitney",
            StatKind::Pearson => "pearson",
            StatKind::Pca => "pca",
            StatKind::Likert => "likert",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct StatRequest {
    pub input: PathBuf,
    /// Survey items to use; all items when empty.
    pub items: Vec<String>,
    pub factors: usize,
    pub rotation: Rotation,
    pub confidence: f64,
    /// Column names for `pearson`.
    pub columns: Option<(String, String)>,
}

fn survey(p: &Path) -> Result<SurveyMatrix, CliError> {
    let f = std::fs::File::open(p).map_err(|e| CliError::io(p, e))?;
    SurveyMatrix::from_csv(f).map_err(|e| CliError::Module(format!("{}: {e}", p.display())))
}

fn chosen_items(m: &SurveyMatrix, req: &StatRequest) -> Vec<String> {
    if req.items.is_empty() {
        m.items.clone()
    } else {
        req.items.clone()
    }
}

fn numeric_columns(p: &Path, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |e: csv::Error| CliError::Module(format!("{}: {e}", p.display()));
    let headers = rdr.headers().map_err(bad)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| CliError::Module(format!("{}: no column {name}", p.display())))
    };
    let (ix, iy) = (col(x)?, col(y)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(bad)?;
        let (a, b) = (rec.get(ix).unwrap_or(""), rec.get(iy).unwrap_or(""));
        // incomplete pairs are dropped
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| CliError::Module(format!("{} row {}: {e}", p.display(), row + 2)));
        xs.push(parse(a)?);
        ys.push(parse(b)?);
    }
    Ok((xs, ys))
}

fn groups(p: &Path) -> Result<BTreeMap<String, Vec<f64>>, CliError> {
    #[derive(serde::Deserialize)]
    struct Row {
        group: String,
        value: f64,
    }
    let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes()).deserialize::<Row>() {
        let r = r.map_err(|e| CliError::Module(format!("{}: {e}", p.display())))?;
        out.entry(r.group).or_default().push(r.value);
    }
    Ok(out)
}

/// Computes the statistic and a one-paragraph text summary.
pub fn compute(kind: StatKind, req: &StatRequest) -> Result<(Value, String), CliError> {
    let p = req.input.as_path();
    if !p.exists() {
        return Err(CliError::Missing { path: p.to_path_buf(), what: "statistics input" });
    }
    let m = CliError::module;
    Ok(match kind {
        StatKind::Alpha => {
            let s = survey(p)?;
            let items = chosen_items(&s, req);
            let a = cronbach_alpha(&s.complete_rows(&items).map_err(m)?, req.confidence).map_err(m)?;
            let text = format!(
                "alpha = {:.4} ({:.0}% CI {:.4} to {:.4}), {} respondents, {} items",
                a.alpha,
                a.confidence * 100.0,
                a.ci_low,
                a.ci_high,
                a.respondents,
                a.items
            );
            (json!({ "items": items, "alpha": a }), text)
        }
        StatKind::Kappa => {
            let f = std::fs::File::open(p).map_err(|e| CliError::io(p, e))?;
            let t = RatingTable::from_csv(f).map_err(m)?;
            let k = fleiss_kappa(&t).map_err(m)?;
            let text = match k {
                Some(k) => format!("kappa = {k:.4} over {} items, {} raters", t.counts.len(), t.raters()),
                None => "kappa undefined: every rating fell in one category".to_string(),
            };
            (json!({ "kappa": k, "items": t.counts.len(), "raters": t.raters(), "categories": t.categories }), text)
        }
        StatKind::MannWhitney => {
            let g = groups(p)?;
            if g.len() != 2 {
                return Err(CliError::Module(format!("{}: need exactly two groups, found {}", p.display(), g.len())));
            }
            let mut it = g.iter();
            let ((na, a), (nb, b)) = (it.next().expect("two"), it.next().expect("two"));
            let r = mann_whitney(a, b).map_err(m)?;
            let text = format!("U({na}) = {}, U({nb}) = {}, p = {:.6} ({:?})", r.u, r.u_other, r.p_value, r.method);
            (json!({ "groups": [na, nb], "sizes": [a.len(), b.len()], "result": r }), text)
        }
        StatKind::Pearson => {
            let (x, y) = req
                .columns
                .clone()
                .ok_or_else(|| CliError::Usage("pearson needs --x and --y column names".into()))?;
            let (xs, ys) = numeric_columns(p, &x, &y)?;
            let r = pearson(&xs, &ys).map_err(m)?;
            (json!({ "x": x, "y": y, "result": r }), format!("r = {:.4}, p = {:.6}, n = {}", r.r, r.p_value, r.n))
        }
        StatKind::Pca => {
            let s = survey(p)?;
            let items = chosen_items(&s, req);
            let res = pca(&s.complete_rows(&items).map_err(m)?, req.factors, req.rotation).map_err(m)?;
            let flagged: Vec<&str> = res
                .flags
                .iter()
                .zip(&items)
                .filter(|(f, _)| f.low_loading || f.low_communality)
                .map(|(_, i)| i.as_str())
                .collect();
            let text = format!(
                "{} factors from {} items and {} respondents; eigenvalues {:.3?}; KMO {}; flagged items: {}",
                req.factors,
                res.items,
                res.respondents,
                res.eigenvalues,
                res.kmo.as_ref().map_or("undefined".into(), |k| format!("{:.3}", k.overall)),
                if flagged.is_empty() { "none".into() } else { flagged.join(", ") }
            );
            (json!({ "item_labels": items, "pca": res }), text)
        }
        StatKind::Likert => {
            let s = survey(p)?;
            let mut out = BTreeMap::new();
            let mut lines = Vec::new();
            for item in chosen_items(&s, req) {
                let sum = likert_summary(s.column(&item).map_err(m)?).map_err(m)?;
                lines.push(format!("{item}: {:?} modes {:?}", sum.counts, sum.modes));
                out.insert(item, sum);
            }
            (serde_json::to_value(&out).expect("serializes"), lines.join("\n"))
        }
    })
}

pub fn stats(cfg: &RunConfig, kind: StatKind, req: &StatRequest) -> Result<(Vec<FileHash>, String), CliError> {
    let (value, text) = compute(kind, req)?;
    let mut out = Outputs::new(&cfg.paths.out);
    let mut body = serde_json::to_string_pretty(&json!({ "kind": kind.name(), "input": req.input, "result": value }))
        .expect("serializes");
    body.push('\n');
    out.write(format!("stats_{}.json", kind.name()), body)?;
    Ok((out.finish(&format!("stats-{}", kind.name()), cfg, std::slice::from_ref(&req.input))?, text))
}
