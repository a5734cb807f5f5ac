//! Bagged ensemble of entropy-split classification trees.
//!
//! Each tree is grown on a bootstrap sample, considering a random subset of
//! features at every node. Class probabilities are averaged across trees.
//! Samples left out of a tree's bootstrap give the out-of-bag estimate, and
//! impurity decrease summed over all splits gives feature importances.
//!
//! ```
//! use teamtrace_bsas::forest::{ForestParams, RandomForest};
//!
//! let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 7 % 5) as f64]).collect();
//! let y: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
//! let params = ForestParams { n_trees: 20, ..ForestParams::default() };
//! let forest = RandomForest::fit(&x, &y, 2, &params, 1).unwrap();
//! assert_eq!(forest.predict(&[35.0, 1.0]), 1);
//! assert!(forest.importances()[0] > forest.importances()[1]);
//! ```

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::BsasError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `floor(sqrt(p))`, at least 1.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, p: usize) -> usize {
        let m = match self {
            MaxFeatures::Sqrt => (p as f64).sqrt().floor() as usize,
            MaxFeatures::All => p,
            MaxFeatures::Count(c) => c,
        };
        m.clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, max_depth: None, min_samples_leaf: 1, max_features: MaxFeatures::Sqrt }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf { proba: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    /// Per-feature impurity decrease, normalized to sum to 1 (all zero for a stump).
    pub importances: Vec<f64>,
    /// Rows not drawn into this tree's bootstrap sample.
    pub oob_rows: Vec<usize>,
}

impl Tree {
    pub fn proba(&self, row: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { proba } => return proba,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

struct Grower<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    params: &'a ForestParams,
    m_try: usize,
    total: f64,
    nodes: Vec<Node>,
    decrease: Vec<f64>,
    rng: ChaCha8Rng,
}

impl Grower<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn leaf(&mut self, counts: &[usize], n: usize) -> usize {
        let proba = counts.iter().map(|&c| c as f64 / n as f64).collect();
        self.nodes.push(Node::Leaf { proba });
        self.nodes.len() - 1
    }

    /// Best (feature, threshold, weighted child entropy) over a random
    /// feature subset.
    fn best_split(&mut self, idx: &mut [usize]) -> Option<(usize, f64, f64)> {
        let p = self.x[0].len();
        let n = idx.len();
        let min_leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<(usize, f64, f64)> = None;
        for f in sample(&mut self.rng, p, self.m_try).into_iter() {
            idx.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left = vec![0; self.n_classes];
            let mut right = self.counts(idx);
            for j in 1..n {
                let moved = self.y[idx[j - 1]];
                left[moved] += 1;
                right[moved] -= 1;
                let (lo, hi) = (self.x[idx[j - 1]][f], self.x[idx[j]][f]);
                if lo >= hi || j < min_leaf || n - j < min_leaf {
                    continue;
                }
                let h = (j as f64 * entropy(&left, j) + (n - j) as f64 * entropy(&right, n - j)) / n as f64;
                if best.is_none_or(|(_, _, b)| h < b) {
                    let mid = lo + (hi - lo) / 2.0;
                    best = Some((f, if mid < hi { mid } else { lo }, h));
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let n = idx.len();
        let counts = self.counts(idx);
        let h = entropy(&counts, n);
        let depth_left = self.params.max_depth.is_none_or(|d| depth < d);
        if h <= 0.0 || !depth_left || n < 2 * self.params.min_samples_leaf.max(1) {
            return self.leaf(&counts, n);
        }
        let Some((feature, threshold, child_h)) = self.best_split(idx) else {
            return self.leaf(&counts, n);
        };
        if h - child_h <= 1e-12 {
            return self.leaf(&counts, n);
        }
        self.decrease[feature] += n as f64 / self.total * (h - child_h);

        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { proba: Vec::new() });
        let x = self.x;
        let (mut l, mut r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][feature] <= threshold);
        let left = self.grow(&mut l, depth + 1);
        let right = self.grow(&mut r, depth + 1);
        self.nodes[at] = Node::Split { feature, threshold, left, right };
        at
    }
}

fn grow_tree(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    params: &ForestParams,
    seed: u64,
) -> Tree {
    let n = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut drawn = vec![false; n];
    for &i in &idx {
        drawn[i] = true;
    }
    let oob_rows = (0..n).filter(|&i| !drawn[i]).collect();
    let p = x[0].len();
    let mut g = Grower {
        x,
        y,
        n_classes,
        params,
        m_try: params.max_features.resolve(p),
        total: n as f64,
        nodes: Vec::new(),
        decrease: vec![0.0; p],
        rng,
    };
    g.grow(&mut idx, 0);
    let sum: f64 = g.decrease.iter().sum();
    let importances = if sum > 0.0 { g.decrease.iter().map(|d| d / sum).collect() } else { vec![0.0; p] };
    Tree { nodes: g.nodes, importances, oob_rows }
}

/// Seed of tree `i` in a forest seeded with `seed`.
fn tree_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_classes: usize,
    pub n_features: usize,
    pub params: ForestParams,
    pub seed: u64,
    pub trees: Vec<Tree>,
    /// Out-of-bag accuracy; `None` if no row was ever out of bag.
    pub oob_score: Option<f64>,
}

pub fn check_training_set(x: &[Vec<f64>], y: &[usize], n_classes: usize) -> Result<(), BsasError> {
    if x.is_empty() || x.len() != y.len() {
        return Err(BsasError::Features(format!("{} rows but {} labels", x.len(), y.len())));
    }
    let p = x[0].len();
    if p == 0 || x.iter().any(|r| r.len() != p) {
        return Err(BsasError::Features("rows must share a non-zero feature count".into()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(BsasError::Features("feature values must be finite".into()));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(BsasError::Param(format!("label {bad} outside 0..{n_classes}")));
    }
    Ok(())
}

impl RandomForest {
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        params: &ForestParams,
        seed: u64,
    ) -> Result<Self, BsasError> {
        check_training_set(x, y, n_classes)?;
        if params.n_trees == 0 || params.min_samples_leaf == 0 {
            return Err(BsasError::Param("n_trees and min_samples_leaf must be >= 1".into()));
        }
        let trees: Vec<Tree> =
            (0..params.n_trees).into_par_iter().map(|i| grow_tree(x, y, n_classes, params, tree_seed(seed, i))).collect();

        let mut votes = vec![vec![0.0; n_classes]; x.len()];
        let mut seen = vec![false; x.len()];
        for t in &trees {
            for &i in &t.oob_rows {
                seen[i] = true;
                for (v, p) in votes[i].iter_mut().zip(t.proba(&x[i])) {
                    *v += p;
                }
            }
        }
        let scored: Vec<usize> = (0..x.len()).filter(|&i| seen[i]).collect();
        let oob_score = (!scored.is_empty())
            .then(|| scored.iter().filter(|&&i| argmax(&votes[i]) == y[i]).count() as f64 / scored.len() as f64);

        Ok(RandomForest { n_classes, n_features: x[0].len(), params: params.clone(), seed, trees, oob_score })
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (a, p) in acc.iter_mut().zip(t.proba(row)) {
                *a += p;
            }
        }
        let n = self.trees.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    pub fn predict(&self, row: &[f64]) -> usize {
        argmax(&self.predict_proba(row))
    }

    pub fn predict_all(&self, x: &[Vec<f64>]) -> Vec<usize> {
        x.par_iter().map(|r| self.predict(r)).collect()
    }

    /// Mean of per-tree normalized impurity decreases, renormalized to sum to 1.
    pub fn importances(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for t in &self.trees {
            for (a, v) in acc.iter_mut().zip(&t.importances) {
                *a += v;
            }
        }
        let sum: f64 = acc.iter().sum();
        if sum > 0.0 {
            acc.iter_mut().for_each(|a| *a /= sum);
        }
        acc
    }
}

/// Index of the largest value; the first one on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}
