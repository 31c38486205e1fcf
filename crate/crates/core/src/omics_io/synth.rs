use std::collections::BTreeMap;

use ndarray::Array2;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{ClinicalRecord, ClinicalTable, OmicKind, OmicsMatrix, SampleType, Subtype};
use crate::error::{Error, Result};

fn default_coverage() -> f64 {
    1.0
}

/// Generator settings for one omic layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmicSynthSpec {
    pub kind: OmicKind,
    pub n_features: usize,
    /// Fraction of features whose LUAD mean is shifted.
    pub informative_fraction: f64,
    /// Shift range in units of `noise_sd`; each informative feature draws
    /// uniformly from `[effect_min, effect_max]` with a random sign.
    pub effect_min: f64,
    pub effect_max: f64,
    pub noise_sd: f64,
    /// Shared class-0 mean, keeps column sums positive.
    pub baseline: f64,
    /// Probability that a sample is profiled on this omic.
    #[serde(default = "default_coverage")]
    pub coverage: f64,
}

impl OmicSynthSpec {
    pub fn new(kind: OmicKind, n_features: usize) -> Self {
        Self {
            kind,
            n_features,
            informative_fraction: 0.1,
            effect_min: 2.0,
            effect_max: 2.0,
            noise_sd: 1.0,
            baseline: 10.0,
            coverage: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub samples_per_class: usize,
    pub omics: Vec<OmicSynthSpec>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            samples_per_class: 100,
            omics: OmicKind::ALL
                .iter()
                .map(|&k| OmicSynthSpec::new(k, 200))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCohort {
    pub omics: Vec<OmicsMatrix>,
    pub clinical: ClinicalTable,
    /// Per omic: informative feature ids with their signed effect in sd units.
    pub informative: Vec<Vec<(String, f64)>>,
}

fn feature_id(kind: OmicKind, j: usize) -> String {
    match kind {
        OmicKind::DnaMethylation => format!("cg{j:08}"),
        OmicKind::RnaSeq => format!("ENSG{j:011}"),
        OmicKind::MirnaSeq => format!("hsa-mir-{j:04}"),
    }
}

/// Class-conditional Gaussian cohort. Samples alternate LUSC/LUAD by index.
pub fn generate_synthetic_cohort(spec: &SyntheticSpec, seed: u64) -> Result<SyntheticCohort> {
    if spec.samples_per_class == 0 {
        return Err(Error::invalid("samples_per_class must be positive"));
    }
    if spec.omics.is_empty() {
        return Err(Error::invalid("at least one omic layer is required"));
    }
    for o in &spec.omics {
        if o.n_features == 0 {
            return Err(Error::invalid(format!("{} has no features", o.kind)));
        }
        if !(o.noise_sd > 0.0) || !(0.0..=1.0).contains(&o.informative_fraction) {
            return Err(Error::invalid(format!(
                "{}: invalid noise or fraction",
                o.kind
            )));
        }
        if o.effect_min > o.effect_max || !(o.coverage > 0.0 && o.coverage <= 1.0) {
            return Err(Error::invalid(format!(
                "{}: invalid effect range or coverage",
                o.kind
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * spec.samples_per_class;
    let sample_ids: Vec<String> = (0..n).map(|i| format!("TCGA-SYN-{i:05}")).collect();
    let subtypes: Vec<Subtype> = (0..n)
        .map(|i| {
            if i % 2 == 0 {
                Subtype::LuscI
            } else {
                Subtype::LuadII
            }
        })
        .collect();

    let mut omics = Vec::with_capacity(spec.omics.len());
    let mut informative = Vec::with_capacity(spec.omics.len());
    for o in &spec.omics {
        let n_inf = (o.informative_fraction * o.n_features as f64).round() as usize;
        let mut effects = vec![0.0; o.n_features];
        let mut truth = Vec::with_capacity(n_inf);
        let mut picks = index::sample(&mut rng, o.n_features, n_inf).into_vec();
        picks.sort_unstable();
        for j in picks {
            let magnitude = if o.effect_max > o.effect_min {
                rng.random_range(o.effect_min..=o.effect_max)
            } else {
                o.effect_min
            };
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            effects[j] = sign * magnitude;
            truth.push((feature_id(o.kind, j), effects[j]));
        }

        let rows: Vec<usize> = (0..n)
            .filter(|_| o.coverage >= 1.0 || rng.random_bool(o.coverage))
            .collect();
        let noise = Normal::new(0.0, o.noise_sd).expect("noise_sd checked positive");
        let mut values = Array2::<f64>::zeros((rows.len(), o.n_features));
        for (r, &i) in rows.iter().enumerate() {
            let luad = subtypes[i] == Subtype::LuadII;
            for j in 0..o.n_features {
                let shift = if luad { effects[j] * o.noise_sd } else { 0.0 };
                values[[r, j]] = o.baseline + shift + noise.sample(&mut rng);
            }
        }
        omics.push(OmicsMatrix::new(
            o.kind,
            (0..o.n_features).map(|j| feature_id(o.kind, j)).collect(),
            rows.iter().map(|&i| sample_ids[i].clone()).collect(),
            values,
            o.kind.default_unit(),
        )?);
        informative.push(truth);
    }

    let clinical = ClinicalTable::new(
        sample_ids
            .iter()
            .zip(&subtypes)
            .map(|(s, &t)| ClinicalRecord {
                sample_id: s.clone(),
                subtype: t,
                sample_type: SampleType::PrimaryTumor,
                attributes: BTreeMap::new(),
            })
            .collect(),
    )?;
    Ok(SyntheticCohort {
        omics,
        clinical,
        informative,
    })
}
