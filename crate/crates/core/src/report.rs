//! Post-training feature attribution, class-mean association and
//! per-feature reports.

use std::collections::HashMap;
use std::io::Write;

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::BinaryClassifier;
use crate::error::{Error, Result};
use crate::omics_io::{LabeledDataset, Subtype};
use crate::qnn::QnnModel;
use crate::stats::{column_means, FeatureStats, ALPHA};

/// Finite-difference step on the scaled input.
pub const GRADIENT_STEP: f64 = 1e-4;
pub const DEFAULT_TOP_N: usize = 32;
pub const DEFAULT_DEVIATION_TOP_N: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceMode {
    /// Mean absolute input gradient of the predicted probability.
    #[default]
    Gradient,
    /// Mean absolute hidden-layer weight per unit, only when the dense layer
    /// is as wide as the input.
    Dense,
}

/// `(1/n) Σ_j |∂f/∂z_i|` at each instance `j`, by central differences on
/// the scaled input.
pub fn gradient_importance<M: BinaryClassifier + ?Sized>(
    model: &M,
    x: ArrayView2<'_, f64>,
) -> Result<Vec<f64>> {
    if x.nrows() == 0 {
        return Err(Error::invalid("importance needs at least one instance"));
    }
    if x.ncols() != model.n_features() {
        return Err(Error::Shape {
            expected: model.n_features(),
            actual: x.ncols(),
        });
    }
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let per_row: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|r| {
            let mut z = model.scaler().transform_row(r)?;
            let mut g = Vec::with_capacity(z.len());
            for i in 0..z.len() {
                let orig = z[i];
                z[i] = orig + GRADIENT_STEP;
                let up = model.predict_scaled(&z)?;
                z[i] = orig - GRADIENT_STEP;
                let down = model.predict_scaled(&z)?;
                z[i] = orig;
                g.push(((up - down) / (2.0 * GRADIENT_STEP)).abs());
            }
            Ok(g)
        })
        .collect::<Result<_>>()?;
    let n = per_row.len() as f64;
    let mut out = vec![0.0; x.ncols()];
    for g in &per_row {
        for (acc, v) in out.iter_mut().zip(g) {
            *acc += v;
        }
    }
    out.iter_mut().for_each(|v| *v /= n);
    Ok(out)
}

/// Hidden unit `i` stands for feature `i`; importance is the mean absolute
/// weight of that unit.
pub fn dense_importance(model: &QnnModel) -> Result<Vec<f64>> {
    let cfg = &model.config;
    if cfg.dense_width != cfg.n_features {
        return Err(Error::invalid(format!(
            "dense importance needs dense_width ({}) = n_features ({})",
            cfg.dense_width, cfg.n_features
        )));
    }
    Ok(model
        .params
        .w1
        .iter()
        .map(|row| row.iter().map(|w| w.abs()).sum::<f64>() / row.len() as f64)
        .collect())
}

pub fn weight_importance(
    model: &QnnModel,
    x: ArrayView2<'_, f64>,
    mode: ImportanceMode,
) -> Result<Vec<f64>> {
    match mode {
        ImportanceMode::Gradient => gradient_importance(model, x),
        ImportanceMode::Dense => dense_importance(model),
    }
}

/// Per-feature `(μ_LUAD, μ_LUSC)`.
pub fn class_mean_levels(d: &LabeledDataset) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((column_means(d, 1)?, column_means(d, 0)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Association {
    #[serde(rename = "LUAD")]
    Luad,
    #[serde(rename = "LUSC")]
    Lusc,
}

impl Association {
    pub fn as_str(self) -> &'static str {
        match self {
            Association::Luad => Subtype::LuadII.as_str(),
            Association::Lusc => Subtype::LuscI.as_str(),
        }
    }
}

/// LUAD iff `μ_LUAD > μ_LUSC`; ties go to LUSC.
pub fn associate(mu_luad: f64, mu_lusc: f64) -> Association {
    if mu_luad > mu_lusc {
        Association::Luad
    } else {
        Association::Lusc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    MostSignificant,
    LessSignificant,
}

impl Significance {
    pub fn from_p(p: f64) -> Self {
        if p < ALPHA {
            Significance::MostSignificant
        } else {
            Significance::LessSignificant
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Significance::MostSignificant => "most_significant",
            Significance::LessSignificant => "less_significant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub feature_id: String,
    pub importance: f64,
    pub mean_luad: f64,
    pub mean_lusc: f64,
    pub association: Association,
    pub p_value: f64,
    pub significance: Significance,
}

/// One record per feature, sorted by importance (descending, ties by id).
pub fn build_report_from_importance(
    importance: &[f64],
    d: &LabeledDataset,
    stats: &[FeatureStats],
) -> Result<Vec<FeatureReport>> {
    if importance.len() != d.n_features() {
        return Err(Error::Shape {
            expected: d.n_features(),
            actual: importance.len(),
        });
    }
    let by_id: HashMap<&str, &FeatureStats> =
        stats.iter().map(|s| (s.feature_id.as_str(), s)).collect();
    let (luad, lusc) = class_mean_levels(d)?;
    let mut out = d
        .feature_ids()
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let s = by_id
                .get(id.as_str())
                .ok_or_else(|| Error::invalid(format!("no statistics for feature {id}")))?;
            Ok(FeatureReport {
                feature_id: id.clone(),
                importance: importance[j],
                mean_luad: luad[j],
                mean_lusc: lusc[j],
                association: associate(luad[j], lusc[j]),
                p_value: s.p_value,
                significance: Significance::from_p(s.p_value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| {
        b.importance
            .total_cmp(&a.importance)
            .then_with(|| a.feature_id.cmp(&b.feature_id))
    });
    Ok(out)
}

/// Gradient importances over the rows of `d`, then
/// [`build_report_from_importance`].
pub fn build_report<M: BinaryClassifier + ?Sized>(
    model: &M,
    d: &LabeledDataset,
    stats: &[FeatureStats],
) -> Result<Vec<FeatureReport>> {
    let imp = gradient_importance(model, d.values().view())?;
    build_report_from_importance(&imp, d, stats)
}

pub fn top_n(report: &[FeatureReport], n: usize) -> &[FeatureReport] {
    &report[..n.min(report.len())]
}

/// Parse a two-column `id<TAB>name` mapping; a header starting with
/// `feature_id` is skipped.
pub fn parse_name_map(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (i == 0 && line.starts_with("feature_id")) {
            continue;
        }
        let (id, name) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: "name map".into(),
            line: i + 1,
            msg: "expected two tab-separated columns".into(),
        })?;
        map.insert(id.to_string(), name.to_string());
    }
    Ok(map)
}

pub fn write_report_tsv<W: Write>(
    mut w: W,
    report: &[FeatureReport],
    names: Option<&HashMap<String, String>>,
) -> std::io::Result<()> {
    writeln!(
        w,
        "rank\tfeature_id\tname\tp_value\timportance\tmean_luad\tmean_lusc\tassociation\tsignificance"
    )?;
    for (i, r) in report.iter().enumerate() {
        let name = names
            .and_then(|m| m.get(&r.feature_id))
            .map_or("NA", String::as_str);
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            r.feature_id,
            name,
            r.p_value,
            r.importance,
            r.mean_luad,
            r.mean_lusc,
            r.association.as_str(),
            r.significance.as_str()
        )?;
    }
    Ok(())
}

/// Long-format values by class for the given features (for violin or box
/// plots rendered elsewhere).
pub fn write_plot_data<W: Write, S: AsRef<str>>(
    mut w: W,
    d: &LabeledDataset,
    feature_ids: &[S],
) -> Result<()> {
    let io = |e| Error::io("plot data", e);
    writeln!(w, "feature_id\tsample_id\tsubtype\tvalue").map_err(io)?;
    for id in feature_ids {
        let id = id.as_ref();
        let j = d
            .feature_index(id)
            .ok_or_else(|| Error::invalid(format!("unknown feature {id}")))?;
        for (i, s) in d.sample_ids().iter().enumerate() {
            let sub = Subtype::from_label(d.labels()[i])?;
            writeln!(w, "{id}\t{s}\t{}\t{}", sub.as_str(), d.values()[[i, j]]).map_err(io)?;
        }
    }
    Ok(())
}

/// Min-max normalisation; constant vectors map to zeros.
pub fn min_max_normalize(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - lo) / range).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationScore {
    pub feature_id: String,
    pub tp_deviation: f64,
    pub tn_deviation: f64,
    pub score: f64,
}

/// Rank features by how far their true-positive and true-negative means sit
/// from the overall mean: `score = norm(|μ_TP − μ|) + norm(|μ_TN − μ|)`,
/// each vector min-max normalised. Returns the top `n` (ties by id).
pub fn deviation_scores_from_predictions(
    test: &LabeledDataset,
    preds: &[u8],
    n: usize,
) -> Result<Vec<DeviationScore>> {
    if preds.len() != test.n_samples() {
        return Err(Error::Shape {
            expected: test.n_samples(),
            actual: preds.len(),
        });
    }
    let labels = test.labels();
    let tp: Vec<usize> = (0..preds.len())
        .filter(|&i| labels[i] == 1 && preds[i] == 1)
        .collect();
    let tn: Vec<usize> = (0..preds.len())
        .filter(|&i| labels[i] == 0 && preds[i] == 0)
        .collect();
    if tp.is_empty() || tn.is_empty() {
        return Err(Error::invalid(
            "deviation scoring needs true positives and true negatives",
        ));
    }
    let x = test.values();
    let mean_of =
        |rows: &[usize], j: usize| rows.iter().map(|&i| x[[i, j]]).sum::<f64>() / rows.len() as f64;
    let all: Vec<usize> = (0..test.n_samples()).collect();
    let p = test.n_features();
    let mut dtp = Vec::with_capacity(p);
    let mut dtn = Vec::with_capacity(p);
    for j in 0..p {
        let overall = mean_of(&all, j);
        dtp.push((mean_of(&tp, j) - overall).abs());
        dtn.push((mean_of(&tn, j) - overall).abs());
    }
    let (ntp, ntn) = (min_max_normalize(&dtp), min_max_normalize(&dtn));
    let mut out: Vec<DeviationScore> = test
        .feature_ids()
        .iter()
        .enumerate()
        .map(|(j, id)| DeviationScore {
            feature_id: id.clone(),
            tp_deviation: dtp[j],
            tn_deviation: dtn[j],
            score: ntp[j] + ntn[j],
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.feature_id.cmp(&b.feature_id))
    });
    out.truncate(n);
    Ok(out)
}

pub fn tp_tn_deviation_scores<M: BinaryClassifier + ?Sized>(
    model: &M,
    test: &LabeledDataset,
    n: usize,
) -> Result<Vec<DeviationScore>> {
    let preds = model.predict_labels(test.values().view(), 0.5)?;
    deviation_scores_from_predictions(test, &preds, n)
}

pub fn write_deviation_tsv<W: Write>(mut w: W, scores: &[DeviationScore]) -> std::io::Result<()> {
    writeln!(w, "rank\tfeature_id\ttp_deviation\ttn_deviation\tscore")?;
    for (i, s) in scores.iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            i + 1,
            s.feature_id,
            s.tp_deviation,
            s.tn_deviation,
            s.score
        )?;
    }
    Ok(())
}
