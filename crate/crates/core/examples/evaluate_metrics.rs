//! Confusion matrix, per-class scores and ROC points from fixed predictions.

use mqml::metrics::{classification_scores, confusion, roc_auc, roc_points};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let labels = [1, 1, 1, 0, 0, 0, 1, 0];
    let probs = [0.9, 0.8, 0.4, 0.3, 0.6, 0.1, 0.7, 0.2];
    let preds: Vec<u8> = probs.iter().map(|&p| u8::from(p >= 0.5)).collect();
    let cm = confusion(&labels, &preds)?;
    for (name, m) in [("LUAD", cm), ("LUSC", cm.flipped())] {
        let s = classification_scores(&m)?;
        println!(
            "{name}: precision {:.3} recall {:.3} f1 {:.3}",
            s.precision, s.recall, s.f1
        );
    }
    println!("AUC {:.4}", roc_auc(&labels, &probs)?);
    for (t, fpr, tpr) in roc_points(&labels, &probs)? {
        println!("{t:.2}\t{fpr:.3}\t{tpr:.3}");
    }
    Ok(())
}
