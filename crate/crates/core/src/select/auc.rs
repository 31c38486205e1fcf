use std::collections::HashSet;

use ndarray::Axis;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{ForestParams, RandomForest};
use crate::metrics::roc_auc;
use crate::omics_io::LabeledDataset;
use crate::seeding::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucScreenParams {
    pub threshold: f64,
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for AucScreenParams {
    fn default() -> Self {
        Self {
            threshold: 0.80,
            n_trees: 250,
            max_depth: None,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucRecord {
    pub feature_id: String,
    pub train_auc: f64,
    pub test_auc: f64,
}

impl AucRecord {
    pub fn passes(&self, threshold: f64) -> bool {
        self.train_auc > threshold && self.test_auc > threshold
    }
}

/// Train a single-feature forest per candidate on `train` and record its
/// ROC-AUC on both splits. Candidates keep their given order (callers pass
/// them score-descending); repeated ids are evaluated once.
pub fn auc_screen(
    train: &LabeledDataset,
    test: &LabeledDataset,
    candidates: &[String],
    params: &AucScreenParams,
) -> Result<Vec<AucRecord>> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidate features to screen"));
    }
    if !train.has_both_classes() || !test.has_both_classes() {
        return Err(Error::invalid("both splits need both classes"));
    }
    let mut seen = HashSet::new();
    let mut ordered = Vec::new();
    for id in candidates {
        if seen.insert(id.as_str()) {
            let ti = train
                .feature_index(id)
                .ok_or_else(|| Error::invalid(format!("{id:?} missing from train split")))?;
            let si = test
                .feature_index(id)
                .ok_or_else(|| Error::invalid(format!("{id:?} missing from test split")))?;
            ordered.push((id, ti, si));
        }
    }
    let forest = ForestParams {
        n_trees: params.n_trees,
        max_depth: params.max_depth,
        ..Default::default()
    };
    ordered
        .par_iter()
        .map(|&(id, ti, si)| {
            let x_train = train.values().select(Axis(1), &[ti]);
            let x_test = test.values().select(Axis(1), &[si]);
            let seed = derive_seed(params.seed, id.as_bytes());
            let rf = RandomForest::fit(x_train.view(), train.labels(), &forest, seed)?;
            Ok(AucRecord {
                feature_id: id.clone(),
                train_auc: roc_auc(train.labels(), &rf.predict_proba_rows(x_train.view()))?,
                test_auc: roc_auc(test.labels(), &rf.predict_proba_rows(x_test.view()))?,
            })
        })
        .collect()
}

/// Candidates whose single-feature forest exceeds `threshold` ROC-AUC on
/// both the training and the test split.
pub fn auc_filter(
    train: &LabeledDataset,
    test: &LabeledDataset,
    candidates: &[String],
    params: &AucScreenParams,
) -> Result<Vec<String>> {
    Ok(auc_screen(train, test, candidates, params)?
        .into_iter()
        .filter(|r| r.passes(params.threshold))
        .map(|r| r.feature_id)
        .collect())
}

#[cfg(test)]
mod tests {
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn cohort(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let values = Array2::from_shape_fn((n, 2), |(i, j)| match j {
            0 => labels[i] as f64,
            _ => rng.random_range(0.0..1.0),
        });
        LabeledDataset::new(
            vec!["label_copy".into(), "noise".into()],
            (0..n).map(|i| format!("s{i:04}")).collect(),
            values,
            labels,
        )
        .unwrap()
    }

    #[test]
    fn keeps_separator_drops_noise() {
        let d = cohort(500, 1);
        let split = d.stratified_split(0.2, 42).unwrap();
        let params = AucScreenParams {
            n_trees: 50,
            ..Default::default()
        };
        let ids = vec!["label_copy".to_string(), "noise".to_string()];
        let recs = auc_screen(&split.train, &split.test, &ids, &params).unwrap();
        assert_eq!((recs[0].train_auc, recs[0].test_auc), (1.0, 1.0));
        assert!(recs[1].test_auc < 0.8, "{:?}", recs[1]);
        let kept = auc_filter(&split.train, &split.test, &ids, &params).unwrap();
        assert_eq!(kept, vec!["label_copy"]);

        let none = AucScreenParams {
            threshold: 1.01,
            ..params
        };
        assert!(auc_filter(&split.train, &split.test, &ids, &none)
            .unwrap()
            .is_empty());
        assert!(auc_filter(&split.train, &split.test, &[], &params).is_err());
    }
}
