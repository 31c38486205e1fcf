//! Univariate and model-based feature scoring, top-k selection, Venn
//! partitioning of per-method selections and per-feature AUC screening.

mod auc;
mod filters;
mod pca;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{Criterion, ForestParams, MaxFeatures, RandomForest};
use crate::omics_io::LabeledDataset;

pub use auc::{auc_filter, auc_screen, AucRecord, AucScreenParams};
pub use filters::{
    chi_square_from_counts, chi_square_scores, contingency, discretize, mutual_info_from_counts,
    mutual_info_scores,
};
pub use pca::pca_feature_scores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MI")]
    MutualInfo,
    #[serde(rename = "Chi2")]
    ChiSquare,
    #[serde(rename = "PCA")]
    Pca,
    #[serde(rename = "RF")]
    RandomForest,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::MutualInfo,
        Method::ChiSquare,
        Method::Pca,
        Method::RandomForest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::MutualInfo => "MI",
            Method::ChiSquare => "Chi2",
            Method::Pca => "PCA",
            Method::RandomForest => "RF",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub method: Method,
    pub entries: Vec<(String, f64)>,
}

impl ScoreTable {
    pub fn new(method: Method, entries: Vec<(String, f64)>) -> Self {
        Self { method, entries }
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "feature_id\t{}", self.method)?;
        for (id, s) in &self.entries {
            writeln!(w, "{id}\t{s}")?;
        }
        Ok(())
    }
}

/// Top `k` features by score, ties broken by ascending feature id.
pub fn select_k_best(s: &ScoreTable, k: usize) -> Result<Vec<String>> {
    if k > s.entries.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} scored features",
            s.entries.len()
        )));
    }
    let mut ranked: Vec<&(String, f64)> = s.entries.iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(id, _)| id.clone())
        .collect())
}

/// Per-method selections with their common and unique sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub per_method: Vec<Vec<String>>,
    /// Intersection of all selections, sorted by id.
    pub common: Vec<String>,
    /// Union of all selections in first-appearance order, no duplicates.
    pub unique: Vec<String>,
    /// `|union| - |common|`.
    pub union_minus_common: usize,
}

pub fn venn_partition(per_method: &[Vec<String>]) -> Result<SelectionResult> {
    if per_method.len() < 2 {
        return Err(Error::invalid("Venn partition needs at least two sets"));
    }
    let mut common: BTreeSet<&str> = per_method[0].iter().map(String::as_str).collect();
    for set in &per_method[1..] {
        let s: HashSet<&str> = set.iter().map(String::as_str).collect();
        common.retain(|id| s.contains(id));
    }
    let mut seen = HashSet::new();
    let unique: Vec<String> = per_method
        .iter()
        .flatten()
        .filter(|id| seen.insert(id.as_str()))
        .cloned()
        .collect();
    Ok(SelectionResult {
        per_method: per_method.to_vec(),
        union_minus_common: unique.len() - common.len(),
        common: common.into_iter().map(str::to_string).collect(),
        unique,
    })
}

/// Gini impurity-decrease importances averaged over a bootstrap forest.
pub fn rf_feature_importances(
    d: &LabeledDataset,
    n_trees: usize,
    max_depth: Option<usize>,
    seed: u64,
) -> Result<ScoreTable> {
    if !d.has_both_classes() {
        return Err(Error::invalid(
            "random forest importances need both classes",
        ));
    }
    let params = ForestParams {
        n_trees,
        max_depth,
        criterion: Criterion::Gini,
        max_features: MaxFeatures::Sqrt,
        ..Default::default()
    };
    let rf = RandomForest::fit(d.values().view(), d.labels(), &params, seed)?;
    Ok(ScoreTable::new(
        Method::RandomForest,
        d.feature_ids()
            .iter()
            .cloned()
            .zip(rf.feature_importances().iter().copied())
            .collect(),
    ))
}
