//! Per-feature two-group statistics for LUSC (label 0) vs LUAD (label 1).

use std::io::Write;

use ndarray::{ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::omics_io::{LabeledDataset, OmicKind};

/// Default significance level.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TMode {
    /// Difference of means over the sum of sample standard deviations,
    /// with `n1 + n2 - 2` degrees of freedom for the p-value.
    Paper,
    /// Welch statistic with Welch–Satterthwaite degrees of freedom.
    #[default]
    Welch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub feature_id: String,
    pub mean_lusc: f64,
    pub mean_luad: f64,
    pub sd_lusc: f64,
    pub sd_luad: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

impl FeatureStats {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

fn class_rows(d: &LabeledDataset, class: u8) -> Vec<usize> {
    d.labels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == class)
        .map(|(i, _)| i)
        .collect()
}

/// Per-feature arithmetic mean over the samples of one class.
pub fn column_means(d: &LabeledDataset, class: u8) -> Result<Vec<f64>> {
    let rows = class_rows(d, class);
    if rows.is_empty() {
        return Err(Error::invalid(format!("class {class} has no samples")));
    }
    let sub = d.values().select(Axis(0), &rows);
    Ok(sub.mean_axis(Axis(0)).expect("non-empty class").to_vec())
}

fn mean_sd(x: ArrayView1<'_, f64>) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.sum() / n;
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Two-sided Student-t tail probability `P(|T| >= |t|)`.
pub fn p_value(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) || !df.is_finite() {
        return Err(Error::invalid(format!(
            "degrees of freedom {df} must be positive"
        )));
    }
    if t.is_nan() {
        return Err(Error::invalid("t statistic is NaN"));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let x = df / (df + t * t);
    let p = statrs::function::beta::beta_reg(0.5 * df, 0.5, x);
    Ok(p.clamp(0.0, 1.0))
}

/// Per-feature t statistics and p-values, in feature order.
pub fn t_statistic(d: &LabeledDataset, mode: TMode) -> Result<Vec<FeatureStats>> {
    let lusc = class_rows(d, 0);
    let luad = class_rows(d, 1);
    if lusc.len() < 2 || luad.len() < 2 {
        return Err(Error::invalid(format!(
            "t-test needs two samples per class, got {} LUSC and {} LUAD",
            lusc.len(),
            luad.len()
        )));
    }
    let x_lusc = d.values().select(Axis(0), &lusc);
    let x_luad = d.values().select(Axis(0), &luad);
    let (n1, n2) = (lusc.len() as f64, luad.len() as f64);

    d.feature_ids()
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let (m1, s1) = mean_sd(x_lusc.column(j));
            let (m2, s2) = mean_sd(x_luad.column(j));
            let diff = m1 - m2;
            let (denom, df) = match mode {
                TMode::Paper => (s1 + s2, n1 + n2 - 2.0),
                TMode::Welch => {
                    let (v1, v2) = (s1 * s1 / n1, s2 * s2 / n2);
                    let df = (v1 + v2).powi(2) / (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
                    ((v1 + v2).sqrt(), df)
                }
            };
            let (t_stat, p) = if denom > 0.0 {
                let t = diff / denom;
                (t, p_value(t, df)?)
            } else if diff != 0.0 {
                (f64::INFINITY.copysign(diff), 0.0)
            } else {
                (0.0, 1.0)
            };
            Ok(FeatureStats {
                feature_id: id.clone(),
                mean_lusc: m1,
                mean_luad: m2,
                sd_lusc: s1,
                sd_luad: s2,
                t_stat,
                p_value: p,
            })
        })
        .collect()
}

/// One p-value window `(low, high]`, optionally truncated to the
/// `max_count` most significant features. A window starting at 0 also
/// admits `p == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValueWindow {
    pub low: f64,
    pub high: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_count: Option<usize>,
}

impl PValueWindow {
    pub fn new(low: f64, high: f64, max_count: Option<usize>) -> Self {
        Self {
            low,
            high,
            max_count,
        }
    }

    fn contains(&self, p: f64) -> bool {
        (p > self.low || (self.low == 0.0 && p == 0.0)) && p <= self.high
    }
}

/// Windows modelled on the per-omic p-value ranges and subset sizes used
/// for the TCGA lung cohorts (two significant windows plus one
/// non-significant window; miRNA has two windows).
pub fn tcga_scheme(kind: OmicKind) -> Vec<PValueWindow> {
    match kind {
        OmicKind::DnaMethylation => vec![
            PValueWindow::new(0.0, 2.89e-6, Some(159_885)),
            PValueWindow::new(2.89e-6, ALPHA, Some(44_459)),
            PValueWindow::new(ALPHA, 1.0, Some(58_885)),
        ],
        OmicKind::RnaSeq => vec![
            PValueWindow::new(0.0, 2.53e-5, Some(29_900)),
            PValueWindow::new(2.53e-5, ALPHA, Some(14_600)),
            PValueWindow::new(ALPHA, 1.0, Some(21_424)),
        ],
        OmicKind::MirnaSeq => vec![
            PValueWindow::new(0.0, 2.35e-3, Some(721)),
            PValueWindow::new(2.35e-3, 1.0, Some(986)),
        ],
    }
}

fn validate_scheme(scheme: &[PValueWindow]) -> Result<()> {
    for w in scheme {
        if !(0.0 <= w.low && w.low < w.high && w.high <= 1.0) {
            return Err(Error::invalid(format!(
                "invalid p-value range ({}, {}]",
                w.low, w.high
            )));
        }
    }
    let mut sorted: Vec<&PValueWindow> = scheme.iter().collect();
    sorted.sort_by(|a, b| a.low.total_cmp(&b.low));
    for pair in sorted.windows(2) {
        if pair[1].low < pair[0].high {
            return Err(Error::invalid(format!(
                "p-value ranges ({}, {}] and ({}, {}] overlap",
                pair[0].low, pair[0].high, pair[1].low, pair[1].high
            )));
        }
    }
    Ok(())
}

/// Sort features by ascending p-value (ties by id) and partition them into
/// the configured windows, in scheme order.
pub fn split_by_pvalue(
    stats: &[FeatureStats],
    scheme: &[PValueWindow],
) -> Result<Vec<Vec<String>>> {
    validate_scheme(scheme)?;
    let mut ranked: Vec<&FeatureStats> = stats.iter().collect();
    ranked.sort_by(|a, b| {
        a.p_value
            .total_cmp(&b.p_value)
            .then_with(|| a.feature_id.cmp(&b.feature_id))
    });
    Ok(scheme
        .iter()
        .map(|w| {
            ranked
                .iter()
                .filter(|s| w.contains(s.p_value))
                .take(w.max_count.unwrap_or(usize::MAX))
                .map(|s| s.feature_id.clone())
                .collect()
        })
        .collect())
}

pub fn write_stats_tsv<W: Write>(mut w: W, stats: &[FeatureStats]) -> std::io::Result<()> {
    writeln!(
        w,
        "feature_id\tmean_lusc\tmean_luad\tsd_lusc\tsd_luad\tt_stat\tp_value"
    )?;
    for s in stats {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.feature_id, s.mean_lusc, s.mean_luad, s.sd_lusc, s.sd_luad, s.t_stat, s.p_value
        )?;
    }
    Ok(())
}

pub fn parse_stats_tsv(text: &str) -> Result<Vec<FeatureStats>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 7 {
            return Err(Error::invalid(format!(
                "stats line {}: expected 7 columns",
                i + 1
            )));
        }
        let num = |k: usize| {
            c[k].parse::<f64>()
                .map_err(|_| Error::invalid(format!("stats line {}: bad number {:?}", i + 1, c[k])))
        };
        out.push(FeatureStats {
            feature_id: c[0].to_string(),
            mean_lusc: num(1)?,
            mean_luad: num(2)?,
            sd_lusc: num(3)?,
            sd_luad: num(4)?,
            t_stat: num(5)?,
            p_value: num(6)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    use super::*;

    fn two_group(lusc: &[f64], luad: &[f64]) -> LabeledDataset {
        let n = lusc.len() + luad.len();
        let values =
            Array2::from_shape_vec((n, 1), lusc.iter().chain(luad).copied().collect()).unwrap();
        let labels = std::iter::repeat_n(0u8, lusc.len())
            .chain(std::iter::repeat_n(1u8, luad.len()))
            .collect();
        LabeledDataset::new(
            vec!["f".into()],
            (0..n).map(|i| format!("s{i}")).collect(),
            values,
            labels,
        )
        .unwrap()
    }

    #[test]
    fn column_means_per_class() {
        let d = two_group(&[2.0, 4.0], &[7.0]);
        assert_eq!(column_means(&d, 0).unwrap(), vec![3.0]);
        assert_eq!(column_means(&d, 1).unwrap(), vec![7.0]);
        let only_lusc = two_group(&[1.0, 2.0], &[]);
        assert!(column_means(&only_lusc, 1).is_err());
    }

    #[test]
    fn paper_and_welch_hand_values() {
        let d = two_group(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
        let paper = &t_statistic(&d, TMode::Paper).unwrap()[0];
        assert_abs_diff_eq!(paper.t_stat, -1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(paper.sd_lusc, 1.0, epsilon = 1e-15);
        let welch = &t_statistic(&d, TMode::Welch).unwrap()[0];
        assert_abs_diff_eq!(welch.t_stat, -3.0 / (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(welch.t_stat, -3.6742, epsilon = 1e-4);
    }

    #[test]
    fn identical_means_give_zero_t() {
        let d = two_group(&[1.0, 3.0], &[0.0, 4.0]);
        let s = &t_statistic(&d, TMode::Welch).unwrap()[0];
        assert_eq!(s.t_stat, 0.0);
        assert_abs_diff_eq!(s.p_value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_denominator_conventions() {
        let d = two_group(&[1.0, 1.0], &[2.0, 2.0]);
        let s = &t_statistic(&d, TMode::Welch).unwrap()[0];
        assert_eq!(s.t_stat, f64::NEG_INFINITY);
        assert_eq!(s.p_value, 0.0);
        let flat = two_group(&[1.0, 1.0], &[1.0, 1.0]);
        let s = &t_statistic(&flat, TMode::Paper).unwrap()[0];
        assert_eq!((s.t_stat, s.p_value), (0.0, 1.0));
    }

    #[test]
    fn too_few_samples() {
        let d = two_group(&[1.0], &[2.0, 3.0]);
        assert!(t_statistic(&d, TMode::Welch).is_err());
    }

    #[test]
    fn p_value_basics() {
        assert_eq!(p_value(0.0, 5.0).unwrap(), 1.0);
        assert_eq!(p_value(2.3, 7.0).unwrap(), p_value(-2.3, 7.0).unwrap());
        assert!(p_value(1.0, 0.0).is_err());
        assert!(p_value(1.0, -3.0).is_err());
        // large df approaches the normal tail: 2 * (1 - Phi(1.959964)) = 0.05
        assert_abs_diff_eq!(p_value(1.959_963_985, 1e7).unwrap(), 0.05, epsilon = 1e-6);
    }

    fn fs(id: &str, p: f64) -> FeatureStats {
        FeatureStats {
            feature_id: id.into(),
            mean_lusc: 0.0,
            mean_luad: 0.0,
            sd_lusc: 1.0,
            sd_luad: 1.0,
            t_stat: 0.0,
            p_value: p,
        }
    }

    #[test]
    fn split_partitions_by_window() {
        let stats = vec![fs("d", 0.9), fs("a", 0.01), fs("c", 0.6), fs("b", 0.02)];
        let scheme = [
            PValueWindow::new(0.0, 0.05, Some(2)),
            PValueWindow::new(0.05, 1.0, Some(2)),
        ];
        let out = split_by_pvalue(&stats, &scheme).unwrap();
        assert_eq!(out, vec![vec!["a", "b"], vec!["c", "d"]]);

        let empty = split_by_pvalue(&stats, &[PValueWindow::new(0.03, 0.5, None)]).unwrap();
        assert!(empty[0].is_empty());
    }

    #[test]
    fn split_ties_break_by_id_and_truncate() {
        let stats = vec![fs("z", 0.01), fs("y", 0.01), fs("x", 0.0)];
        let out = split_by_pvalue(&stats, &[PValueWindow::new(0.0, 0.05, Some(2))]).unwrap();
        assert_eq!(out[0], vec!["x", "y"]);
    }

    #[test]
    fn split_rejects_bad_ranges() {
        let stats = vec![fs("a", 0.1)];
        assert!(split_by_pvalue(&stats, &[PValueWindow::new(0.5, 0.1, None)]).is_err());
        assert!(split_by_pvalue(
            &stats,
            &[
                PValueWindow::new(0.0, 0.3, None),
                PValueWindow::new(0.2, 1.0, None)
            ]
        )
        .is_err());
    }

    #[test]
    fn tcga_dna_scheme_third_window_is_non_significant() {
        let scheme = tcga_scheme(OmicKind::DnaMethylation);
        assert_eq!(scheme.len(), 3);
        assert_eq!((scheme[2].low, scheme[2].high), (0.05, 1.0));
        let stats = vec![fs("a", 1e-9), fs("b", 1e-3), fs("c", 0.4), fs("d", 0.999)];
        let out = split_by_pvalue(&stats, &scheme).unwrap();
        assert_eq!(out, vec![vec!["a"], vec!["b"], vec!["c", "d"]]);
        assert_eq!(tcga_scheme(OmicKind::MirnaSeq).len(), 2);
    }

    #[test]
    fn stats_tsv_roundtrip() {
        let d = two_group(&[1.0, 2.5, 3.0], &[4.0, 5.0, 6.25]);
        let s = t_statistic(&d, TMode::Welch).unwrap();
        let mut buf = Vec::new();
        write_stats_tsv(&mut buf, &s).unwrap();
        assert_eq!(
            parse_stats_tsv(std::str::from_utf8(&buf).unwrap()).unwrap(),
            s
        );
    }
}
