//! Rank features by model sensitivity and attach class association and
//! significance.

use mqml::baselines::{lr_train, LrConfig};
use mqml::omics_io::{generate_synthetic_cohort, join_clinical, SyntheticSpec};
use mqml::report::{build_report, top_n, tp_tn_deviation_scores, write_report_tsv};
use mqml::stats::{t_statistic, TMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cohort = generate_synthetic_cohort(&SyntheticSpec::default(), 5)?;
    let d = join_clinical(&cohort.omics[1], &cohort.clinical)?;
    let model = lr_train(&d, &LrConfig::default())?;
    let stats = t_statistic(&d, TMode::Welch)?;
    let report = build_report(&model, &d, &stats)?;
    write_report_tsv(std::io::stdout().lock(), top_n(&report, 10), None)?;
    for s in tp_tn_deviation_scores(&model, &d, 5)? {
        println!("{}\tdeviation score {:.4}", s.feature_id, s.score);
    }
    Ok(())
}
