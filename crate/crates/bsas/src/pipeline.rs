//! Stratified hold-out split, cross-validated grid search and final fit.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{dummy_baseline_analytic, dummy_baseline_mc};
use crate::error::BsasError;
use crate::forest::{check_training_set, ForestParams, MaxFeatures, RandomForest};
use crate::metrics::{evaluate, macro_f1, Evaluation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_trees: Vec<usize>,
    /// `None` entries mean unlimited depth.
    pub max_depth: Vec<Option<usize>>,
    pub min_samples_leaf: Vec<usize>,
    pub max_features: MaxFeatures,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_trees: vec![100, 300],
            max_depth: vec![Some(3), Some(6), None],
            min_samples_leaf: vec![1, 5],
            max_features: MaxFeatures::Sqrt,
        }
    }
}

impl GridConfig {
    pub fn candidates(&self) -> Vec<ForestParams> {
        let mut out = Vec::new();
        for &n_trees in &self.n_trees {
            for &max_depth in &self.max_depth {
                for &min_samples_leaf in &self.min_samples_leaf {
                    out.push(ForestParams { n_trees, max_depth, min_samples_leaf, max_features: self.max_features });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub test_fraction: f64,
    pub folds: usize,
    pub grid: GridConfig,
    pub seed: u64,
    pub baseline_draws: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { test_fraction: 0.2, folds: 10, grid: GridConfig::default(), seed: 0, baseline_draws: 100_000 }
    }
}

/// Row indices per class, each list shuffled.
fn shuffled_by_class(y: &[usize], n_classes: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut by = vec![Vec::new(); n_classes];
    for (i, &k) in y.iter().enumerate() {
        by[k].push(i);
    }
    by.iter_mut().for_each(|v| v.shuffle(rng));
    by
}

/// Splits rows so that every class contributes `round(frac * count)` rows
/// (at least one, leaving at least one) to the test side.
pub fn stratified_split(y: &[usize], n_classes: usize, frac: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for rows in shuffled_by_class(y, n_classes, &mut rng) {
        if rows.is_empty() {
            continue;
        }
        let t = ((rows.len() as f64 * frac).round() as usize).clamp(1, rows.len().saturating_sub(1).max(1));
        let t = if rows.len() == 1 { 0 } else { t };
        test.extend_from_slice(&rows[..t]);
        train.extend_from_slice(&rows[t..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Fold index per row; each class is dealt round-robin across folds.
pub fn stratified_folds(y: &[usize], n_classes: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; y.len()];
    let mut next = 0;
    for rows in shuffled_by_class(y, n_classes, &mut rng) {
        for i in rows {
            fold[i] = next % k;
            next += 1;
        }
    }
    fold
}

fn take<T: Clone>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

/// Mean macro-F1 of `params` over `k` stratified folds.
pub fn cross_validate(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    params: &ForestParams,
    k: usize,
    seed: u64,
) -> Result<f64, BsasError> {
    let fold = stratified_folds(y, n_classes, k, seed);
    let scores = (0..k)
        .into_par_iter()
        .map(|f| {
            let tr: Vec<usize> = (0..y.len()).filter(|&i| fold[i] != f).collect();
            let te: Vec<usize> = (0..y.len()).filter(|&i| fold[i] == f).collect();
            if te.is_empty() {
                return Ok(None);
            }
            let model = RandomForest::fit(&take(x, &tr), &take(y, &tr), n_classes, params, seed.wrapping_add(f as u64))?;
            Ok(Some(macro_f1(&take(y, &te), &model.predict_all(&take(x, &te)), n_classes)))
        })
        .collect::<Result<Vec<_>, BsasError>>()?;
    let used: Vec<f64> = scores.into_iter().flatten().collect();
    Ok(used.iter().sum::<f64>() / used.len().max(1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub params: ForestParams,
    pub cv_macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub grid: Vec<GridResult>,
    pub best: ForestParams,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub oob_score: Option<f64>,
    pub test: Evaluation,
    pub baseline_macro_f1: f64,
    pub baseline_analytic: f64,
    pub importances: Vec<f64>,
    pub model: RandomForest,
}

/// Minimum rows per class for the hold-out split and cross-validation.
pub const MIN_PER_CLASS: usize = 2;

pub fn run_pipeline(x: &[Vec<f64>], y: &[usize], n_classes: usize, cfg: &PipelineConfig) -> Result<PipelineReport, BsasError> {
    check_training_set(x, y, n_classes)?;
    let min_rows = 5 * n_classes;
    if x.len() < min_rows {
        return Err(BsasError::TooFewRows { need: min_rows, got: x.len() });
    }
    for k in 0..n_classes {
        let count = y.iter().filter(|&&c| c == k).count();
        if count < MIN_PER_CLASS {
            return Err(BsasError::SparseClass { class: k, count, min: MIN_PER_CLASS });
        }
    }
    if !(0.0 < cfg.test_fraction && cfg.test_fraction < 1.0) || cfg.folds < 2 {
        return Err(BsasError::Param("test_fraction must be in (0, 1) and folds >= 2".into()));
    }
    let candidates = cfg.grid.candidates();
    if candidates.is_empty() {
        return Err(BsasError::Param("hyperparameter grid is empty".into()));
    }

    let (train_rows, test_rows) = stratified_split(y, n_classes, cfg.test_fraction, cfg.seed);
    let (xtr, ytr) = (take(x, &train_rows), take(y, &train_rows));
    let grid = candidates
        .into_iter()
        .map(|params| {
            let cv_macro_f1 = cross_validate(&xtr, &ytr, n_classes, &params, cfg.folds, cfg.seed)?;
            Ok(GridResult { params, cv_macro_f1 })
        })
        .collect::<Result<Vec<_>, BsasError>>()?;
    let best = grid
        .iter()
        .fold(None::<&GridResult>, |acc, g| match acc {
            Some(a) if a.cv_macro_f1 >= g.cv_macro_f1 => Some(a),
            _ => Some(g),
        })
        .expect("grid is non-empty")
        .params
        .clone();

    let model = RandomForest::fit(&xtr, &ytr, n_classes, &best, cfg.seed)?;
    let yte = take(y, &test_rows);
    let test = evaluate(&yte, &model.predict_all(&take(x, &test_rows)), n_classes);
    Ok(PipelineReport {
        importances: model.importances(),
        oob_score: model.oob_score,
        baseline_macro_f1: dummy_baseline_mc(&yte, n_classes, cfg.baseline_draws, cfg.seed),
        baseline_analytic: dummy_baseline_analytic(&yte, n_classes),
        grid,
        best,
        train_rows,
        test_rows,
        test,
        model,
    })
}
