mod common;

use common::*;
use mqml::metrics::{classification_scores, confusion, roc_auc, roc_points, ConfusionMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact rational `num/den` reduced by gcd, then converted once.
fn rational(num: u64, den: u64) -> f64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(num, den).max(1);
    (num / g) as f64 / (den / g) as f64
}

#[test]
fn auc_matches_pair_counting_with_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..500 {
        let n = rng.random_range(2..80);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        // coarse scores force many ties
        let levels = rng.random_range(1..10);
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..levels) as f64 / 4.0)
            .collect();
        assert_eq!(
            roc_auc(&labels, &scores).unwrap(),
            auc_pairs_oracle(&labels, &scores)
        );
    }
}

#[test]
fn auc_errors_and_extremes() {
    assert!(roc_auc(&[1, 1], &[0.1, 0.2]).is_err());
    assert!(roc_auc(&[0, 1], &[0.1]).is_err());
    assert!(roc_auc(&[0, 1], &[f64::NAN, 0.2]).is_err());
    assert_eq!(roc_auc(&[0, 1], &[0.1, 0.9]).unwrap(), 1.0);
    assert_eq!(roc_auc(&[0, 1], &[0.9, 0.1]).unwrap(), 0.0);
    assert_eq!(roc_auc(&[0, 1], &[0.5, 0.5]).unwrap(), 0.5);
}

#[test]
fn scores_match_rational_hand_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let cm = ConfusionMatrix::new(
            rng.random_range(0..200),
            rng.random_range(0..200),
            rng.random_range(0..200),
            rng.random_range(1..200),
        );
        let s = classification_scores(&cm).unwrap();
        let total = cm.tp + cm.fp + cm.tn + cm.fn_;
        assert_eq!(s.accuracy, rational(cm.tp + cm.tn, total));
        assert_eq!(s.recall, rational(cm.tp, cm.tp + cm.fn_));
        if cm.tp + cm.fp > 0 {
            assert_eq!(s.precision, rational(cm.tp, cm.tp + cm.fp));
        } else {
            assert!(s.precision_undefined && s.precision == 0.0);
        }
        assert_eq!(s.f1, rational(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_));
    }
}

#[test]
fn confusion_counts_and_flip() {
    let cm = confusion(&[1, 1, 0, 0, 1], &[1, 0, 0, 1, 1]).unwrap();
    assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (2, 1, 1, 1));
    let f = cm.flipped();
    assert_eq!((f.tp, f.fp, f.tn, f.fn_), (1, 1, 2, 1));
    assert!(classification_scores(&ConfusionMatrix::new(0, 0, 0, 0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roc_curve_is_monotone_and_spans_the_square(
        pairs in prop::collection::vec((0u8..2, 0u8..20), 2..60)
    ) {
        let labels: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        prop_assume!(labels.contains(&0) && labels.contains(&1));
        let scores: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let pts = roc_points(&labels, &scores).unwrap();
        prop_assert_eq!((pts[0].1, pts[0].2), (0.0, 0.0));
        let last = pts[pts.len() - 1];
        prop_assert_eq!((last.1, last.2), (1.0, 1.0));
        for w in pts.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 && w[1].2 >= w[0].2);
        }
        // trapezoid area equals the rank statistic
        let area: f64 = pts.windows(2).map(|w| (w[1].1 - w[0].1) * (w[1].2 + w[0].2) / 2.0).sum();
        prop_assert!((area - roc_auc(&labels, &scores).unwrap()).abs() < 1e-12);
    }
}
