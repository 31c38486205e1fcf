//! Omic matrices, clinical labels and the joins that turn them into
//! labelled datasets.
//!
//! On disk every matrix is feature-by-sample (first column holds feature
//! identifiers, the header holds sample identifiers). In memory it is
//! sample-by-feature so that features are columns for all downstream math.

mod synth;
mod tsv;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use synth::{generate_synthetic_cohort, OmicSynthSpec, SyntheticCohort, SyntheticSpec};
pub use tsv::{
    parse_clinical, parse_labeled_dataset, parse_omic_matrix, read_clinical, read_labeled_dataset,
    read_omic_matrix, write_clinical, write_feature_matrix, write_labeled_dataset,
    write_omic_matrix, ParseOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OmicKind {
    #[serde(rename = "DNAme")]
    DnaMethylation,
    #[serde(rename = "RNAseq")]
    RnaSeq,
    #[serde(rename = "miRNAseq")]
    MirnaSeq,
}

impl OmicKind {
    pub const ALL: [OmicKind; 3] = [
        OmicKind::DnaMethylation,
        OmicKind::RnaSeq,
        OmicKind::MirnaSeq,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OmicKind::DnaMethylation => "DNAme",
            OmicKind::RnaSeq => "RNAseq",
            OmicKind::MirnaSeq => "miRNAseq",
        }
    }

    /// Namespace prefix applied to feature ids on multi-omic integration.
    pub fn prefix(self) -> &'static str {
        match self {
            OmicKind::DnaMethylation => "DNA:",
            OmicKind::RnaSeq => "RNA:",
            OmicKind::MirnaSeq => "MIR:",
        }
    }

    pub fn default_unit(self) -> &'static str {
        match self {
            OmicKind::DnaMethylation => "beta",
            OmicKind::RnaSeq => "log2(count+1)",
            OmicKind::MirnaSeq => "log2(RPM+1)",
        }
    }
}

impl fmt::Display for OmicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OmicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dname" | "dna" | "methylation" => Ok(OmicKind::DnaMethylation),
            "rnaseq" | "rna" | "rna-seq" => Ok(OmicKind::RnaSeq),
            "mirnaseq" | "mirna" | "mirna-seq" | "mir" => Ok(OmicKind::MirnaSeq),
            _ => Err(Error::invalid(format!("unknown omic kind {s:?}"))),
        }
    }
}

/// Tumour subtype. LUSC is class 0, LUAD is class 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subtype {
    #[serde(rename = "LUSC")]
    LuscI,
    #[serde(rename = "LUAD")]
    LuadII,
}

impl Subtype {
    pub fn label(self) -> u8 {
        match self {
            Subtype::LuscI => 0,
            Subtype::LuadII => 1,
        }
    }

    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            0 => Ok(Subtype::LuscI),
            1 => Ok(Subtype::LuadII),
            _ => Err(Error::invalid(format!("label {label} is not binary"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Subtype::LuscI => "LUSC",
            Subtype::LuadII => "LUAD",
        }
    }
}

impl FromStr for Subtype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "LUSC" | "LUSC_I" | "0" => Ok(Subtype::LuscI),
            "LUAD" | "LUAD_II" | "1" => Ok(Subtype::LuadII),
            other => Err(Error::invalid(format!("unknown subtype {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SampleType {
    PrimaryTumor,
    SolidTissueNormal,
}

impl SampleType {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleType::PrimaryTumor => "Primary Tumor",
            SampleType::SolidTissueNormal => "Solid Tissue Normal",
        }
    }
}

impl FromStr for SampleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "primarytumor" | "tumor" | "01" => Ok(SampleType::PrimaryTumor),
            "solidtissuenormal" | "normal" | "11" => Ok(SampleType::SolidTissueNormal),
            _ => Err(Error::invalid(format!("unknown sample type {s:?}"))),
        }
    }
}

fn ensure_unique(ids: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::invalid(format!("duplicate {what} id {id:?}")));
        }
    }
    Ok(())
}

/// Sample-by-feature matrix for a single omic modality.
#[derive(Debug, Clone, PartialEq)]
pub struct OmicsMatrix {
    omic_kind: OmicKind,
    feature_ids: Vec<String>,
    sample_ids: Vec<String>,
    values: Array2<f64>,
    unit: String,
}

impl OmicsMatrix {
    pub fn new(
        omic_kind: OmicKind,
        feature_ids: Vec<String>,
        sample_ids: Vec<String>,
        values: Array2<f64>,
        unit: impl Into<String>,
    ) -> Result<Self> {
        if values.nrows() != sample_ids.len() {
            return Err(Error::Shape {
                expected: sample_ids.len(),
                actual: values.nrows(),
            });
        }
        if values.ncols() != feature_ids.len() {
            return Err(Error::Shape {
                expected: feature_ids.len(),
                actual: values.ncols(),
            });
        }
        ensure_unique(&feature_ids, "feature")?;
        ensure_unique(&sample_ids, "sample")?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value {v} in matrix")));
        }
        Ok(Self {
            omic_kind,
            feature_ids,
            sample_ids,
            values,
            unit: unit.into(),
        })
    }

    pub fn omic_kind(&self) -> OmicKind {
        self.omic_kind
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_ids.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalRecord {
    pub sample_id: String,
    pub subtype: Subtype,
    pub sample_type: SampleType,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClinicalTable {
    records: Vec<ClinicalRecord>,
}

impl ClinicalTable {
    pub fn new(records: Vec<ClinicalRecord>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.sample_id.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate sample id {:?} in clinical table",
                    r.sample_id
                )));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[ClinicalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, sample_id: &str) -> Option<&ClinicalRecord> {
        self.records.iter().find(|r| r.sample_id == sample_id)
    }

    /// Keep only records of the given sample type.
    pub fn filter_sample_type(&self, sample_type: SampleType) -> ClinicalTable {
        ClinicalTable {
            records: self
                .records
                .iter()
                .filter(|r| r.sample_type == sample_type)
                .cloned()
                .collect(),
        }
    }
}

/// Feature matrix aligned with binary subtype labels (0 = LUSC, 1 = LUAD).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    feature_ids: Vec<String>,
    sample_ids: Vec<String>,
    values: Array2<f64>,
    labels: Vec<u8>,
}

impl LabeledDataset {
    pub fn new(
        feature_ids: Vec<String>,
        sample_ids: Vec<String>,
        values: Array2<f64>,
        labels: Vec<u8>,
    ) -> Result<Self> {
        if values.nrows() != sample_ids.len() {
            return Err(Error::Shape {
                expected: sample_ids.len(),
                actual: values.nrows(),
            });
        }
        if values.ncols() != feature_ids.len() {
            return Err(Error::Shape {
                expected: feature_ids.len(),
                actual: values.ncols(),
            });
        }
        if labels.len() != sample_ids.len() {
            return Err(Error::Shape {
                expected: sample_ids.len(),
                actual: labels.len(),
            });
        }
        if let Some(l) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::invalid(format!("label {l} is not binary")));
        }
        ensure_unique(&feature_ids, "feature")?;
        ensure_unique(&sample_ids, "sample")?;
        Ok(Self {
            feature_ids,
            sample_ids,
            values,
            labels,
        })
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn class_count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn has_both_classes(&self) -> bool {
        self.class_count(0) > 0 && self.class_count(1) > 0
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.feature_ids.iter().position(|f| f == id)
    }

    /// Restrict to the given feature ids, in the order given.
    pub fn select_features<S: AsRef<str>>(&self, ids: &[S]) -> Result<LabeledDataset> {
        let lookup: HashMap<&str, usize> = self
            .feature_ids
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_str(), i))
            .collect();
        let cols = ids
            .iter()
            .map(|id| {
                lookup
                    .get(id.as_ref())
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("unknown feature {:?}", id.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.select_columns(&cols)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<LabeledDataset> {
        if let Some(&c) = cols.iter().find(|&&c| c >= self.n_features()) {
            return Err(Error::Index {
                index: c,
                len: self.n_features(),
            });
        }
        LabeledDataset::new(
            cols.iter().map(|&c| self.feature_ids[c].clone()).collect(),
            self.sample_ids.clone(),
            self.values.select(Axis(1), cols),
            self.labels.clone(),
        )
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<LabeledDataset> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.n_samples()) {
            return Err(Error::Index {
                index: r,
                len: self.n_samples(),
            });
        }
        LabeledDataset::new(
            self.feature_ids.clone(),
            rows.iter().map(|&r| self.sample_ids[r].clone()).collect(),
            self.values.select(Axis(0), rows),
            rows.iter().map(|&r| self.labels[r]).collect(),
        )
    }

    /// Stratified train/test split. Each class is shuffled with a seeded
    /// generator and `round(test_fraction * n_class)` samples go to test.
    /// Row order inside each split follows the original dataset order.
    pub fn stratified_split(&self, test_fraction: f64, seed: u64) -> Result<TrainTestSplit> {
        if !(0.0..1.0).contains(&test_fraction) || test_fraction == 0.0 {
            return Err(Error::invalid(format!(
                "test fraction {test_fraction} must lie in (0, 1)"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut is_test = vec![false; self.n_samples()];
        for class in [0u8, 1] {
            let members: Vec<usize> = (0..self.n_samples())
                .filter(|&i| self.labels[i] == class)
                .collect();
            let n_test = (test_fraction * members.len() as f64).round() as usize;
            if n_test == 0 || n_test >= members.len() {
                return Err(Error::invalid(format!(
                    "degenerate split: class {class} has {} samples",
                    members.len()
                )));
            }
            for pick in index::sample(&mut rng, members.len(), n_test) {
                is_test[members[pick]] = true;
            }
        }
        let train: Vec<usize> = (0..self.n_samples()).filter(|&i| !is_test[i]).collect();
        let test: Vec<usize> = (0..self.n_samples()).filter(|&i| is_test[i]).collect();
        Ok(TrainTestSplit {
            train: self.select_rows(&train)?,
            test: self.select_rows(&test)?,
            train_rows: train,
            test_rows: test,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrainTestSplit {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// Remove every feature whose column sum is not strictly positive.
pub fn drop_nonpositive_features(m: &OmicsMatrix) -> OmicsMatrix {
    let keep: Vec<usize> = m
        .values
        .axis_iter(Axis(1))
        .enumerate()
        .filter(|(_, col)| col.sum() > 0.0)
        .map(|(j, _)| j)
        .collect();
    OmicsMatrix {
        omic_kind: m.omic_kind,
        feature_ids: keep.iter().map(|&j| m.feature_ids[j].clone()).collect(),
        sample_ids: m.sample_ids.clone(),
        values: m.values.select(Axis(1), &keep),
        unit: m.unit.clone(),
    }
}

/// Append the samples of `b` after those of `a`.
pub fn concat_cohorts(a: &OmicsMatrix, b: &OmicsMatrix) -> Result<OmicsMatrix> {
    if a.omic_kind != b.omic_kind {
        return Err(Error::invalid(format!(
            "cannot concatenate {} with {}",
            a.omic_kind, b.omic_kind
        )));
    }
    if a.feature_ids != b.feature_ids {
        return Err(Error::invalid("feature mismatch between cohorts"));
    }
    let ids_a: HashSet<&str> = a.sample_ids.iter().map(String::as_str).collect();
    if let Some(dup) = b.sample_ids.iter().find(|s| ids_a.contains(s.as_str())) {
        return Err(Error::invalid(format!("overlapping sample id {dup:?}")));
    }
    let values = ndarray::concatenate(Axis(0), &[a.values.view(), b.values.view()])
        .expect("column counts already checked");
    let mut sample_ids = a.sample_ids.clone();
    sample_ids.extend(b.sample_ids.iter().cloned());
    Ok(OmicsMatrix {
        omic_kind: a.omic_kind,
        feature_ids: a.feature_ids.clone(),
        sample_ids,
        values,
        unit: a.unit.clone(),
    })
}

/// Attach subtype labels, keeping samples present in both inputs, sorted by id.
pub fn join_clinical(m: &OmicsMatrix, c: &ClinicalTable) -> Result<LabeledDataset> {
    let subtypes: HashMap<&str, Subtype> = c
        .records
        .iter()
        .map(|r| (r.sample_id.as_str(), r.subtype))
        .collect();
    let mut rows: Vec<(usize, &String)> = m
        .sample_ids
        .iter()
        .enumerate()
        .filter(|(_, s)| subtypes.contains_key(s.as_str()))
        .collect();
    if rows.is_empty() {
        return Err(Error::invalid(
            "empty intersection between matrix and clinical sample ids",
        ));
    }
    rows.sort_by(|a, b| a.1.cmp(b.1));
    let idx: Vec<usize> = rows.iter().map(|r| r.0).collect();
    LabeledDataset::new(
        m.feature_ids.clone(),
        rows.iter().map(|r| r.1.clone()).collect(),
        m.values.select(Axis(0), &idx),
        rows.iter()
            .map(|r| subtypes[r.1.as_str()].label())
            .collect(),
    )
}

/// Restrict every dataset to the common samples and concatenate their
/// feature columns in input order, namespacing ids by omic kind.
pub fn intersect_and_join(omics: &[(OmicKind, &LabeledDataset)]) -> Result<LabeledDataset> {
    if omics.len() < 2 {
        return Err(Error::invalid("integration needs at least two datasets"));
    }
    let mut labels: BTreeMap<&str, u8> = BTreeMap::new();
    let mut common: BTreeSet<&str> = omics[0].1.sample_ids.iter().map(String::as_str).collect();
    for (_, d) in omics {
        let ids: BTreeSet<&str> = d.sample_ids.iter().map(String::as_str).collect();
        common = common.intersection(&ids).copied().collect();
    }
    for (_, d) in omics {
        for (s, &l) in d.sample_ids.iter().zip(&d.labels) {
            if !common.contains(s.as_str()) {
                continue;
            }
            if let Some(prev) = labels.insert(s.as_str(), l) {
                if prev != l {
                    return Err(Error::invalid(format!(
                        "conflicting labels for shared sample {s:?}"
                    )));
                }
            }
        }
    }
    if common.is_empty() {
        return Err(Error::invalid("no samples shared by all datasets"));
    }
    let sample_ids: Vec<String> = common.iter().map(|s| s.to_string()).collect();
    let mut blocks = Vec::with_capacity(omics.len());
    let mut feature_ids = Vec::new();
    for (kind, d) in omics {
        let pos: HashMap<&str, usize> = d
            .sample_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let rows: Vec<usize> = common.iter().map(|s| pos[s]).collect();
        blocks.push(d.values.select(Axis(0), &rows));
        feature_ids.extend(
            d.feature_ids
                .iter()
                .map(|f| format!("{}{f}", kind.prefix())),
        );
    }
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let values = ndarray::concatenate(Axis(1), &views).expect("row counts agree");
    let labels = common.iter().map(|s| labels[s]).collect();
    LabeledDataset::new(feature_ids, sample_ids, values, labels)
}

/// Seeded uniform draw of `n` distinct features; original column order is kept.
pub fn subsample_features(d: &LabeledDataset, n: usize, seed: u64) -> Result<LabeledDataset> {
    if n > d.n_features() {
        return Err(Error::invalid(format!(
            "cannot draw {n} features from {}",
            d.n_features()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols = index::sample(&mut rng, d.n_features(), n).into_vec();
    cols.sort_unstable();
    d.select_columns(&cols)
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn matrix(samples: &[&str], features: &[&str], values: Array2<f64>) -> OmicsMatrix {
        OmicsMatrix::new(OmicKind::RnaSeq, ids(features), ids(samples), values, "u").unwrap()
    }

    fn clinical(rows: &[(&str, Subtype)]) -> ClinicalTable {
        ClinicalTable::new(
            rows.iter()
                .map(|(s, t)| ClinicalRecord {
                    sample_id: s.to_string(),
                    subtype: *t,
                    sample_type: SampleType::PrimaryTumor,
                    attributes: BTreeMap::new(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn drop_nonpositive_keeps_only_positive_sums() {
        let m = matrix(
            &["s1", "s2"],
            &["a", "b", "c"],
            array![[2.0, 0.0, -1.0], [3.0, 0.0, 0.0]],
        );
        let out = drop_nonpositive_features(&m);
        assert_eq!(out.feature_ids(), &["a".to_string()]);
        assert_eq!(drop_nonpositive_features(&out), out);
    }

    #[test]
    fn concat_adds_samples_and_rejects_overlap() {
        let a = matrix(&["s1", "s2"], &["f"], array![[1.0], [2.0]]);
        let b = matrix(&["s3", "s4", "s5"], &["f"], array![[3.0], [4.0], [5.0]]);
        let c = concat_cohorts(&a, &b).unwrap();
        assert_eq!(c.n_samples(), 5);
        assert_eq!(c.values()[[4, 0]], 5.0);

        let err = concat_cohorts(&a, &a).unwrap_err();
        assert!(err.to_string().contains("overlapping sample"));

        let other = matrix(&["s9"], &["g"], array![[1.0]]);
        assert!(concat_cohorts(&a, &other).is_err());
    }

    #[test]
    fn join_clinical_intersects_and_sorts() {
        let m = matrix(&["C", "A", "B"], &["f"], array![[3.0], [1.0], [2.0]]);
        let c = clinical(&[
            ("D", Subtype::LuscI),
            ("C", Subtype::LuadII),
            ("B", Subtype::LuscI),
        ]);
        let d = join_clinical(&m, &c).unwrap();
        assert_eq!(d.sample_ids(), &ids(&["B", "C"]));
        assert_eq!(d.labels(), &[0, 1]);
        assert_eq!(d.values()[[0, 0]], 2.0);

        let disjoint = clinical(&[("Z", Subtype::LuscI)]);
        assert!(join_clinical(&m, &disjoint).is_err());
    }

    fn dataset(samples: &[&str], features: &[&str], labels: Vec<u8>) -> LabeledDataset {
        let values = Array2::from_shape_fn((samples.len(), features.len()), |(i, j)| {
            (i * 10 + j) as f64
        });
        LabeledDataset::new(ids(features), ids(samples), values, labels).unwrap()
    }

    #[test]
    fn intersect_and_join_prefixes_and_intersects() {
        let dna = dataset(&["a", "b", "c"], &["cg1", "cg2"], vec![0, 1, 0]);
        let rna = dataset(&["c", "b"], &["ENSG1"], vec![0, 1]);
        let mir = dataset(&["b", "x"], &["mir1", "mir2"], vec![1, 0]);
        let d = intersect_and_join(&[
            (OmicKind::DnaMethylation, &dna),
            (OmicKind::RnaSeq, &rna),
            (OmicKind::MirnaSeq, &mir),
        ])
        .unwrap();
        assert_eq!(d.sample_ids(), &ids(&["b"]));
        assert_eq!(
            d.feature_ids(),
            &ids(&["DNA:cg1", "DNA:cg2", "RNA:ENSG1", "MIR:mir1", "MIR:mir2"])
        );
        // b is row 1 in dna, row 1 in rna, row 0 in mir
        assert_eq!(d.values().row(0).to_vec(), vec![10.0, 11.0, 10.0, 0.0, 1.0]);
    }

    #[test]
    fn intersect_and_join_rejects_label_conflict() {
        let a = dataset(&["s1", "s2"], &["f"], vec![0, 1]);
        let b = dataset(&["s1", "s2"], &["g"], vec![1, 1]);
        let err = intersect_and_join(&[(OmicKind::DnaMethylation, &a), (OmicKind::RnaSeq, &b)])
            .unwrap_err();
        assert!(err.to_string().contains("conflicting"));
    }

    #[test]
    fn subsample_is_deterministic_and_bounded() {
        let feats: Vec<String> = (0..256).map(|i| format!("f{i:03}")).collect();
        let refs: Vec<&str> = feats.iter().map(String::as_str).collect();
        let d = dataset(&["a", "b"], &refs, vec![0, 1]);
        let x = subsample_features(&d, 64, 7).unwrap();
        let y = subsample_features(&d, 64, 7).unwrap();
        assert_eq!(x.n_features(), 64);
        assert_eq!(x, y);
        assert_eq!(subsample_features(&d, 256, 3).unwrap(), d);
        assert!(subsample_features(&d, 300, 7).is_err());
    }

    #[test]
    fn stratified_split_preserves_class_balance() {
        let samples: Vec<String> = (0..100).map(|i| format!("s{i:03}")).collect();
        let refs: Vec<&str> = samples.iter().map(String::as_str).collect();
        let labels = (0..100).map(|i| (i % 2) as u8).collect();
        let d = dataset(&refs, &["f"], labels);
        let s = d.stratified_split(0.2, 42).unwrap();
        assert_eq!(s.test.n_samples(), 20);
        assert_eq!(s.test.class_count(1), 10);
        assert_eq!(s.train.n_samples(), 80);
        let again = d.stratified_split(0.2, 42).unwrap();
        assert_eq!(s.test_rows, again.test_rows);
    }

    #[test]
    fn matrix_invariants_are_checked() {
        let err = OmicsMatrix::new(
            OmicKind::RnaSeq,
            ids(&["f"]),
            ids(&["s", "s"]),
            array![[1.0], [2.0]],
            "u",
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate sample id"));
        assert!(OmicsMatrix::new(
            OmicKind::RnaSeq,
            ids(&["f"]),
            ids(&["s"]),
            array![[f64::NAN]],
            "u"
        )
        .is_err());
    }
}
