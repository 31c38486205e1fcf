//! Ward clustering of feature columns and one representative per cluster.

use mqml::cluster::{
    cluster_importance, cut_tree, pairwise_euclidean, top_k_per_cluster, ward_linkage, CutCriterion,
};
use ndarray::array;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // four samples × six features; columns 0-2 and 3-5 form two groups
    let x = array![
        [1.0, 1.1, 0.9, 8.0, 8.2, 7.9],
        [1.2, 1.0, 1.1, 8.1, 7.8, 8.0],
        [0.9, 1.0, 1.0, 7.7, 8.0, 8.3],
        [1.1, 1.2, 0.8, 8.0, 8.1, 7.8],
    ];
    let ids: Vec<String> = (0..6).map(|j| format!("g{j}")).collect();
    let linkage = ward_linkage(&pairwise_euclidean(x.view())?)?;
    linkage.write_tsv(std::io::stdout().lock())?;
    for crit in [CutCriterion::MaxClust(2), CutCriterion::Distance(3.5)] {
        let labels = cut_tree(&linkage, crit)?;
        let reps = top_k_per_cluster(x.view(), &ids, &labels, 1)?;
        let imp = cluster_importance(x.view(), &labels)?;
        println!("{crit:?}: labels {labels:?}, importance {imp:.3?}, representatives {reps:?}");
    }
    Ok(())
}
