use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Axis;

use super::{Method, ScoreTable};
use crate::error::{Error, Result};
use crate::omics_io::LabeledDataset;

/// Variance-weighted absolute loadings on the leading principal components.
///
/// Columns are z-scored, the covariance `ZᵀZ / (n − 1)` is eigendecomposed,
/// and feature `j` scores `Σ_{i<k} λᵢ·|e_ij| / Σ λ`. Constant columns are left
/// out of the decomposition and score 0.
pub fn pca_feature_scores(d: &LabeledDataset, k_components: usize) -> Result<ScoreTable> {
    let n = d.n_samples();
    let p = d.n_features();
    if n < 2 {
        return Err(Error::invalid("PCA needs at least two samples"));
    }
    if k_components == 0 || k_components > n.min(p) {
        return Err(Error::invalid(format!(
            "k_components = {k_components} must lie in [1, {}]",
            n.min(p)
        )));
    }
    let x = d.values();
    let mut kept = Vec::new();
    let mut z_cols: Vec<Vec<f64>> = Vec::new();
    for (j, col) in x.axis_iter(Axis(1)).enumerate() {
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let sd = var.sqrt();
        if sd > 0.0 {
            kept.push(j);
            z_cols.push(col.iter().map(|v| (v - mean) / sd).collect());
        }
    }
    let mut scores = vec![0.0; p];
    if !kept.is_empty() {
        let m = kept.len();
        let z = DMatrix::from_fn(n, m, |i, j| z_cols[j][i]);
        let cov = (z.transpose() * &z) / (n as f64 - 1.0);
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let total: f64 = eig.eigenvalues.iter().map(|l| l.max(0.0)).sum();
        for &c in order.iter().take(k_components.min(m)) {
            let lambda = eig.eigenvalues[c].max(0.0);
            let v = eig.eigenvectors.column(c);
            // |e_ij| makes the score independent of eigenvector sign
            for (r, &j) in kept.iter().enumerate() {
                scores[j] += lambda * v[r].abs() / total;
            }
        }
    }
    Ok(ScoreTable::new(
        Method::Pca,
        d.feature_ids().iter().cloned().zip(scores).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    use super::*;

    fn ds(values: Array2<f64>) -> LabeledDataset {
        let (n, p) = values.dim();
        LabeledDataset::new(
            (0..p).map(|j| format!("f{j}")).collect(),
            (0..n).map(|i| format!("s{i}")).collect(),
            values,
            (0..n).map(|i| (i % 2) as u8).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_feature_scores_one() {
        let s = pca_feature_scores(
            &ds(Array2::from_shape_vec((4, 1), vec![1., 3., 2., 8.]).unwrap()),
            1,
        )
        .unwrap();
        assert_abs_diff_eq!(s.entries[0].1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_columns_score_equally() {
        let v = vec![
            1., 1., 1., //
            1., -1., -1., //
            -1., 1., -1., //
            -1., -1., 1.,
        ];
        let s = pca_feature_scores(&ds(Array2::from_shape_vec((4, 3), v).unwrap()), 3).unwrap();
        for e in &s.entries {
            assert_abs_diff_eq!(e.1, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_column_scores_zero() {
        let v = vec![1., 5., 2., 5., 3., 5., 7., 5.];
        let s = pca_feature_scores(&ds(Array2::from_shape_vec((4, 2), v).unwrap()), 1).unwrap();
        assert_eq!(s.entries[1].1, 0.0);
        assert_abs_diff_eq!(s.entries[0].1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_k() {
        let d = ds(Array2::from_shape_vec((3, 2), vec![1., 2., 3., 4., 5., 7.]).unwrap());
        assert!(pca_feature_scores(&d, 0).is_err());
        assert!(pca_feature_scores(&d, 3).is_err());
    }
}
