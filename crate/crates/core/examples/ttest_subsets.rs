//! Per-feature t-tests on a synthetic cohort, then p-value subsets.

use mqml::omics_io::{generate_synthetic_cohort, join_clinical, OmicKind, SyntheticSpec};
use mqml::stats::{split_by_pvalue, t_statistic, PValueWindow, TMode, ALPHA};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cohort = generate_synthetic_cohort(&SyntheticSpec::default(), 42)?;
    let rna = cohort
        .omics
        .iter()
        .find(|m| m.omic_kind() == OmicKind::RnaSeq)
        .expect("default spec has RNA-seq");
    let d = join_clinical(rna, &cohort.clinical)?;
    for mode in [TMode::Welch, TMode::Paper] {
        let stats = t_statistic(&d, mode)?;
        let sig = stats.iter().filter(|s| s.is_significant(ALPHA)).count();
        let scheme = [
            PValueWindow::new(0.0, 1e-4, None),
            PValueWindow::new(1e-4, ALPHA, None),
            PValueWindow::new(ALPHA, 1.0, Some(50)),
        ];
        let sizes: Vec<usize> = split_by_pvalue(&stats, &scheme)?
            .iter()
            .map(Vec::len)
            .collect();
        println!(
            "{mode:?}: {sig}/{} significant, subset sizes {sizes:?}",
            stats.len()
        );
    }
    Ok(())
}
