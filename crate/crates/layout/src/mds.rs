//! Classical (Torgerson) multidimensional scaling.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::LayoutError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    /// One point per input row, `dims` coordinates each.
    pub coords: Vec<Vec<f64>>,
    /// Kruskal stress-1 against the input distances.
    pub stress: f64,
    /// Eigenvalues of the double-centred matrix, descending. Negative
    /// values mean the input is not Euclidean.
    pub eigenvalues: Vec<f64>,
}

fn check(d: &[Vec<f64>]) -> Result<(), LayoutError> {
    let n = d.len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(LayoutError::Matrix(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if row[i] != 0.0 {
            return Err(LayoutError::Matrix(format!("diagonal entry {i} is {}", row[i])));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(LayoutError::Matrix(format!("entry ({i},{j}) = {v}")));
            }
            if (v - d[j][i]).abs() > 1e-9 * v.abs().max(1.0) {
                return Err(LayoutError::Matrix(format!("asymmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

pub fn stress_1(d: &[Vec<f64>], coords: &[Vec<f64>]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let e: f64 = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            num += (d[i][j] - e).powi(2);
            den += d[i][j].powi(2);
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Embeds the symmetric, zero-diagonal distance matrix `d` in `dims`
/// dimensions. Each axis is flipped so its first nonzero coordinate is
/// positive.
pub fn mds_embed(d: &[Vec<f64>], dims: usize) -> Result<Embedding, LayoutError> {
    check(d)?;
    let n = d.len();
    if n == 0 {
        return Ok(Embedding { coords: Vec::new(), stress: 0.0, eigenvalues: Vec::new() });
    }
    // B = -1/2 J D^2 J
    let sq = DMatrix::from_fn(n, n, |i, j| d[i][j] * d[i][j]);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).mean()).collect();
    let grand = sq.mean();
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let scale = eig.eigenvalues.amax().max(1.0);
    let mut coords = vec![vec![0.0; dims]; n];
    for (axis, &k) in order.iter().take(dims).enumerate() {
        let lambda = eig.eigenvalues[k];
        if lambda <= 1e-12 * scale {
            continue;
        }
        let s = lambda.sqrt();
        let v = eig.eigenvectors.column(k);
        let flip = v.iter().find(|x| x.abs() > 1e-9).map_or(1.0, |x| x.signum());
        for i in 0..n {
            coords[i][axis] = flip * v[i] * s;
        }
    }
    let stress = stress_1(d, &coords);
    Ok(Embedding { coords, stress, eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn two_points() {
        let e = mds_embed(&[vec![0.0, 6.0], vec![6.0, 0.0]], 2).unwrap();
        assert!((dist(&e.coords[0], &e.coords[1]) - 6.0).abs() < 1e-12);
        assert!(e.stress < 1e-12);
    }

    #[test]
    fn all_zero_collapses_to_origin() {
        let e = mds_embed(&vec![vec![0.0; 4]; 4], 2).unwrap();
        assert!(e.coords.iter().flatten().all(|&x| x == 0.0));
        assert_eq!(e.stress, 0.0);
    }

    #[test]
    fn single_point_and_empty() {
        let e = mds_embed(&[vec![0.0]], 2).unwrap();
        assert_eq!(e.coords, [vec![0.0, 0.0]]);
        assert!(mds_embed(&[], 2).unwrap().coords.is_empty());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(mds_embed(&[vec![0.0, 1.0], vec![2.0, 0.0]], 2).is_err());
        assert!(mds_embed(&[vec![1.0, 1.0], vec![1.0, 0.0]], 2).is_err());
        assert!(mds_embed(&[vec![0.0, -1.0], vec![-1.0, 0.0]], 2).is_err());
        assert!(mds_embed(&[vec![0.0, 1.0]], 2).is_err());
    }

    #[test]
    fn non_euclidean_input_reports_stress() {
        // violates the triangle inequality
        let d = vec![vec![0.0, 1.0, 10.0], vec![1.0, 0.0, 1.0], vec![10.0, 1.0, 0.0]];
        let e = mds_embed(&d, 2).unwrap();
        assert!(e.stress > 0.01);
        assert!(e.eigenvalues.iter().any(|&l| l < 0.0));
    }
}
