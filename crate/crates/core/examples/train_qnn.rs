//! Train the 32-feature hybrid classifier on a separable synthetic cohort.

use mqml::classifier::BinaryClassifier;
use mqml::metrics::{classification_scores, confusion};
use mqml::omics_io::{
    generate_synthetic_cohort, join_clinical, OmicKind, OmicSynthSpec, SyntheticSpec,
};
use mqml::qnn::{self, QnnConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec {
        samples_per_class: 300,
        omics: vec![OmicSynthSpec {
            informative_fraction: 0.5,
            ..OmicSynthSpec::new(OmicKind::RnaSeq, 32)
        }],
    };
    let cohort = generate_synthetic_cohort(&spec, 42)?;
    let d = join_clinical(&cohort.omics[0], &cohort.clinical)?;
    let split = d.stratified_split(0.2, 42)?;

    let mut cfg = QnnConfig::preset("qnn32")?;
    cfg.epochs = 30;
    let (model, history) = qnn::train(&cfg, &split.train)?;
    history.write_tsv(std::io::stdout().lock())?;
    println!("best epoch {}", history.best_epoch);

    let preds = model.predict_labels(split.test.values().view(), 0.5)?;
    let s = classification_scores(&confusion(split.test.labels(), &preds)?)?;
    println!("test accuracy {:.3}, f1 {:.3}", s.accuracy, s.f1);
    Ok(())
}
