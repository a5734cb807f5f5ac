//! Principal components of an item correlation matrix, with sampling
//! adequacy and sphericity diagnostics.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::StatsError;

pub const MIN_LOADING: f64 = 0.50;
pub const MIN_COMMUNALITY: f64 = 0.40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    #[default]
    None,
    Varimax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kmo {
    pub overall: f64,
    pub per_item: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bartlett {
    pub chi_square: f64,
    pub df: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemFlags {
    pub item: usize,
    pub max_loading: f64,
    pub communality: f64,
    pub low_loading: bool,
    pub low_communality: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    pub items: usize,
    pub respondents: usize,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `loadings[item][factor]`
    pub loadings: Vec<Vec<f64>>,
    pub communalities: Vec<f64>,
    pub flags: Vec<ItemFlags>,
    pub rotation: Rotation,
    /// `None` when the correlation matrix is singular.
    pub kmo: Option<Kmo>,
    pub bartlett: Option<Bartlett>,
}

pub fn correlation_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, StatsError> {
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) {
        return Err(StatsError::Shape("respondents answered different item counts".into()));
    }
    let n = rows.len();
    if n < 2 {
        return Err(StatsError::TooFew { what: "respondents", need: 2, got: n });
    }
    let data = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
    if data.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite("responses"));
    }
    let mut centred = data;
    for j in 0..k {
        let mut col = centred.column_mut(j);
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        if norm == 0.0 {
            return Err(StatsError::ZeroVariance(format!("item {j}")));
        }
        col /= norm;
    }
    let mut r = centred.transpose() * &centred;
    for i in 0..k {
        r[(i, i)] = 1.0;
        for j in 0..i {
            let v = r[(i, j)].clamp(-1.0, 1.0);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    Ok(r)
}

/// Eigenvalues descending with their unit eigenvectors as columns.
fn sorted_eigen(r: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(r.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(r.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn kmo(r: &DMatrix<f64>) -> Option<Kmo> {
    let k = r.nrows();
    let inv = r.clone().try_inverse()?;
    if inv.iter().any(|x| !x.is_finite()) || (0..k).any(|i| inv[(i, i)] <= 0.0) {
        return None;
    }
    let partial = |i: usize, j: usize| -inv[(i, j)] / (inv[(i, i)] * inv[(j, j)]).sqrt();
    let (mut r2, mut p2) = (0.0, 0.0);
    let mut per_item = Vec::with_capacity(k);
    for i in 0..k {
        let (mut ri, mut pi) = (0.0, 0.0);
        for j in (0..k).filter(|&j| j != i) {
            ri += r[(i, j)].powi(2);
            pi += partial(i, j).powi(2);
        }
        per_item.push(if ri + pi > 0.0 { ri / (ri + pi) } else { 0.0 });
        r2 += ri;
        p2 += pi;
    }
    let overall = if r2 + p2 > 0.0 { r2 / (r2 + p2) } else { 0.0 };
    Some(Kmo { overall, per_item })
}

pub fn bartlett(r: &DMatrix<f64>, respondents: usize) -> Option<Bartlett> {
    let k = r.nrows() as f64;
    let det = r.clone().determinant();
    if det <= 0.0 || !det.is_finite() {
        return None;
    }
    let chi_square = -((respondents as f64 - 1.0) - (2.0 * k + 5.0) / 6.0) * det.ln();
    let df = k * (k - 1.0) / 2.0;
    let p_value = if df > 0.0 { ChiSquared::new(df).ok()?.sf(chi_square.max(0.0)) } else { 1.0 };
    Some(Bartlett { chi_square, df, p_value })
}

/// Kaiser-normalised varimax.
pub fn varimax(loadings: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, m) = loadings.shape();
    if m < 2 {
        return loadings.clone();
    }
    let h: Vec<f64> = (0..p).map(|i| loadings.row(i).norm().max(1e-12)).collect();
    let l = DMatrix::from_fn(p, m, |i, j| loadings[(i, j)] / h[i]);
    let mut rot = DMatrix::<f64>::identity(m, m);
    let mut d = 0.0;
    for _ in 0..500 {
        let lam = &l * &rot;
        let col_ss: Vec<f64> = (0..m).map(|j| lam.column(j).norm_squared()).collect();
        let target = DMatrix::from_fn(p, m, |i, j| lam[(i, j)].powi(3) - lam[(i, j)] * col_ss[j] / p as f64);
        let svd = (l.transpose() * target).svd(true, true);
        let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v requested"));
        rot = u * v_t;
        let d_new = svd.singular_values.sum();
        if d_new < d * (1.0 + 1e-10) {
            break;
        }
        d = d_new;
    }
    let rotated = l * rot;
    DMatrix::from_fn(p, m, |i, j| rotated[(i, j)] * h[i])
}

/// Flips each factor so its largest-magnitude loading is positive.
fn orient(loadings: &mut DMatrix<f64>) {
    for j in 0..loadings.ncols() {
        let mut col = loadings.column_mut(j);
        let lead = col.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
        if lead < 0.0 {
            col.neg_mut();
        }
    }
}

/// Principal components of `rows` (respondents by items), keeping
/// `factors` components.
pub fn pca(rows: &[Vec<f64>], factors: usize, rotation: Rotation) -> Result<Pca, StatsError> {
    let r = correlation_matrix(rows)?;
    let k = r.nrows();
    let n = rows.len();
    if n <= k {
        return Err(StatsError::TooFew { what: "respondents (must exceed item count)", need: k + 1, got: n });
    }
    if factors == 0 || factors > k {
        return Err(StatsError::Param(format!("factor count {factors} must be in 1..={k}")));
    }
    let (eigenvalues, vectors) = sorted_eigen(&r);
    let mut loadings = DMatrix::from_fn(k, factors, |i, j| vectors[(i, j)] * eigenvalues[j].max(0.0).sqrt());
    if rotation == Rotation::Varimax {
        loadings = varimax(&loadings);
    }
    orient(&mut loadings);
    let communalities: Vec<f64> = (0..k).map(|i| loadings.row(i).norm_squared()).collect();
    let flags = (0..k)
        .map(|i| {
            let max_loading = loadings.row(i).iter().fold(0.0f64, |a, x| a.max(x.abs()));
            ItemFlags {
                item: i,
                max_loading,
                communality: communalities[i],
                low_loading: max_loading < MIN_LOADING,
                low_communality: communalities[i] < MIN_COMMUNALITY,
            }
        })
        .collect();
    Ok(Pca {
        items: k,
        respondents: n,
        eigenvalues,
        loadings: (0..k).map(|i| loadings.row(i).iter().copied().collect()).collect(),
        communalities,
        flags,
        rotation,
        kmo: kmo(&r),
        bartlett: bartlett(&r, n),
    })
}

/// Eigenvalues only; works for singular matrices and any respondent count.
pub fn eigenvalues(rows: &[Vec<f64>]) -> Result<Vec<f64>, StatsError> {
    Ok(sorted_eigen(&correlation_matrix(rows)?).0)
}
