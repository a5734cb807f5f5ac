//! Mann-Whitney U test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U for the first sample: pairs where it is larger, plus half the ties.
    pub u: f64,
    pub u_other: f64,
    pub p_value: f64,
    pub method: PMethod,
}

/// Largest smaller sample, and largest pair of samples, tested exactly.
pub const EXACT_MIN_SIZE: usize = 8;
pub const EXACT_BOTH_SIZE: usize = 20;

/// Midranks of the pooled sample, doubled so they stay integral.
fn doubled_ranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1 share their mean; doubled: i + j + 2
        for &o in &order[i..=j] {
            ranks[o] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    ranks
}

fn tie_groups(pooled: &[f64]) -> Vec<usize> {
    let mut v = pooled.to_vec();
    v.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let j = v[i..].iter().take_while(|x| **x == v[i]).count();
        groups.push(j);
        i += j;
    }
    groups
}

/// Number of ways to pick `m` of the pooled values per doubled rank sum.
fn rank_sum_counts(ranks: &[u64], m: usize) -> Vec<u128> {
    let max: u64 = ranks.iter().sum();
    let width = max as usize + 1;
    // ways[j][s]: subsets of size j with doubled rank sum s
    let mut ways = vec![vec![0u128; width]; m + 1];
    ways[0][0] = 1;
    for &r in ranks {
        let r = r as usize;
        for j in (1..=m).rev() {
            let (lo, hi) = ways.split_at_mut(j);
            let prev = &lo[j - 1];
            let cur = &mut hi[0];
            for s in (r..width).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    ways.swap_remove(m)
}

pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::TooFew { what: "observations per sample", need: 1, got: 0 });
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite("samples"));
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_ranks(&pooled);
    let r2: u64 = ranks[..na].iter().sum();
    // U = R - na(na+1)/2, doubled
    let u2 = r2 as f64 - (na * (na + 1)) as f64;
    let u = u2 / 2.0;
    let nanb = (na * nb) as f64;
    let u_other = nanb - u;

    let exact = na.min(nb) <= EXACT_MIN_SIZE || na.max(nb) <= EXACT_BOTH_SIZE;
    let p_value = if exact {
        let counts = rank_sum_counts(&ranks, na);
        // doubled mean rank sum
        let centre = (na * (na + nb + 1)) as i128;
        let observed = (r2 as i128 - centre).abs();
        let total: u128 = counts.iter().sum();
        let extreme: u128 = counts
            .iter()
            .enumerate()
            .filter(|(s, _)| (*s as i128 - centre).abs() >= observed)
            .map(|(_, c)| c)
            .sum();
        extreme as f64 / total as f64
    } else {
        let n = (na + nb) as f64;
        let ties: f64 = tie_groups(&pooled).iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = nanb / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
        if var <= 0.0 {
            1.0
        } else {
            let diff = ((u - nanb / 2.0).abs() - 0.5).max(0.0);
            let z = diff / var.sqrt();
            (2.0 * Normal::standard().sf(z)).min(1.0)
        }
    };
    Ok(MannWhitney { u, u_other, p_value, method: if exact { PMethod::Exact } else { PMethod::Normal } })
}
