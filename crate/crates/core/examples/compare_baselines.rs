//! Logistic regression, MLP and random forest on the same split.

use mqml::baselines::{lr_train, mlp_train, rf_train, LrConfig, MlpConfig, RfConfig};
use mqml::classifier::BinaryClassifier;
use mqml::metrics::roc_auc;
use mqml::omics_io::{
    generate_synthetic_cohort, join_clinical, OmicKind, OmicSynthSpec, SyntheticSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec {
        samples_per_class: 150,
        omics: vec![OmicSynthSpec {
            informative_fraction: 0.2,
            effect_min: 0.5,
            effect_max: 1.0,
            ..OmicSynthSpec::new(OmicKind::MirnaSeq, 64)
        }],
    };
    let cohort = generate_synthetic_cohort(&spec, 3)?;
    let d = join_clinical(&cohort.omics[0], &cohort.clinical)?;
    let split = d.stratified_split(0.25, 3)?;
    let models = [
        lr_train(&split.train, &LrConfig::default())?,
        mlp_train(&split.train, &MlpConfig::default())?,
        rf_train(&split.train, &RfConfig::default())?,
    ];
    for m in &models {
        let p = m.predict_proba_rows(split.test.values().view())?;
        println!(
            "{:?}: test AUC {:.3}",
            m.kind(),
            roc_auc(split.test.labels(), &p)?
        );
    }
    Ok(())
}
