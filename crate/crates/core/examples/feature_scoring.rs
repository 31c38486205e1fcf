//! Score features four ways, take the union of each method's top k and
//! screen the union with single-feature forests.

use mqml::omics_io::{generate_synthetic_cohort, join_clinical, SyntheticSpec};
use mqml::select::{
    auc_filter, chi_square_scores, mutual_info_scores, pca_feature_scores, rf_feature_importances,
    select_k_best, venn_partition, AucScreenParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cohort = generate_synthetic_cohort(&SyntheticSpec::default(), 7)?;
    let d = join_clinical(&cohort.omics[0], &cohort.clinical)?;
    let tables = [
        mutual_info_scores(&d, 10),
        chi_square_scores(&d, 10),
        pca_feature_scores(&d, 10)?,
        rf_feature_importances(&d, 50, None, 7)?,
    ];
    let picks = tables
        .iter()
        .map(|t| select_k_best(t, 15))
        .collect::<mqml::Result<Vec<_>>>()?;
    for (t, p) in tables.iter().zip(&picks) {
        println!("{:>4}: {}", t.method, p[..5].join(" "));
    }
    let venn = venn_partition(&picks)?;
    println!("union {} / common {}", venn.unique.len(), venn.common.len());
    let split = d.stratified_split(0.2, 7)?;
    let kept = auc_filter(
        &split.train,
        &split.test,
        &venn.unique,
        &AucScreenParams::default(),
    )?;
    let truth: Vec<&str> = cohort.informative[0]
        .iter()
        .map(|(id, _)| id.as_str())
        .collect();
    let hits = kept
        .iter()
        .filter(|id| truth.contains(&id.as_str()))
        .count();
    println!(
        "{} passed the AUC screen, {hits} of them informative",
        kept.len()
    );
    Ok(())
}
