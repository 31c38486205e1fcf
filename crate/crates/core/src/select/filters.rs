use ndarray::Axis;

use super::{Method, ScoreTable};
use crate::omics_io::LabeledDataset;

/// Equal-width binning over `[min, max]`. Constant vectors map to bin 0.
pub fn discretize(x: &[f64], bins: usize) -> Vec<usize> {
    let bins = bins.max(2);
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let width = hi - lo;
    if !(width > 0.0) {
        return vec![0; x.len()];
    }
    x.iter()
        .map(|&v| (((v - lo) / width * bins as f64) as usize).min(bins - 1))
        .collect()
}

/// Bin-by-class contingency counts (`n_bins` rows, 2 columns).
pub fn contingency(bins: &[usize], labels: &[u8], n_bins: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; 2]; n_bins];
    for (&b, &y) in bins.iter().zip(labels) {
        t[b][y as usize] += 1;
    }
    t
}

fn margins(t: &[Vec<u64>]) -> (Vec<u64>, Vec<u64>, u64) {
    let cols = t.first().map_or(0, Vec::len);
    let rows: Vec<u64> = t.iter().map(|r| r.iter().sum()).collect();
    let colsum: Vec<u64> = (0..cols).map(|j| t.iter().map(|r| r[j]).sum()).collect();
    let n = rows.iter().sum();
    (rows, colsum, n)
}

/// Plug-in mutual information (nats) of a contingency table. Empty cells
/// contribute nothing.
pub fn mutual_info_from_counts(t: &[Vec<u64>]) -> f64 {
    let (rows, cols, n) = margins(t);
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let mut mi = 0.0;
    for (i, row) in t.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            if o == 0 {
                continue;
            }
            let pxy = o as f64 / n;
            let px = rows[i] as f64 / n;
            let py = cols[j] as f64 / n;
            mi += pxy * (pxy / (px * py)).ln();
        }
    }
    mi.max(0.0)
}

/// Pearson chi-square of observed counts against the independence model.
/// Cells with zero expectation contribute nothing.
pub fn chi_square_from_counts(t: &[Vec<u64>]) -> f64 {
    let (rows, cols, n) = margins(t);
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let mut chi2 = 0.0;
    for (i, row) in t.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = rows[i] as f64 * cols[j] as f64 / n;
            if e > 0.0 {
                chi2 += (o as f64 - e).powi(2) / e;
            }
        }
    }
    chi2
}

fn binned_scores(
    d: &LabeledDataset,
    bins: usize,
    method: Method,
    score: fn(&[Vec<u64>]) -> f64,
) -> ScoreTable {
    let bins = bins.max(2);
    let entries = d
        .values()
        .axis_iter(Axis(1))
        .zip(d.feature_ids())
        .map(|(col, id)| {
            let b = discretize(&col.to_vec(), bins);
            (id.clone(), score(&contingency(&b, d.labels(), bins)))
        })
        .collect();
    ScoreTable::new(method, entries)
}

/// Mutual information between each equal-width-binned feature and the label.
pub fn mutual_info_scores(d: &LabeledDataset, bins: usize) -> ScoreTable {
    binned_scores(d, bins, Method::MutualInfo, mutual_info_from_counts)
}

/// Chi-square statistic between each equal-width-binned feature and the
/// label. Binning is translation invariant, so features need no shifting to
/// be non-negative.
pub fn chi_square_scores(d: &LabeledDataset, bins: usize) -> ScoreTable {
    binned_scores(d, bins, Method::ChiSquare, chi_square_from_counts)
}
