mod common;

use common::*;
use mqml::omics_io::LabeledDataset;
use mqml::select::{
    chi_square_from_counts, chi_square_scores, contingency, discretize, mutual_info_from_counts,
    mutual_info_scores, pca_feature_scores, select_k_best, venn_partition, Method, ScoreTable,
};
use mqml::stats::{p_value, t_statistic, TMode};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_table(rng: &mut impl Rng) -> Vec<Vec<u64>> {
    let rows = rng.random_range(1..=12);
    let cols = rng.random_range(2..=4);
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.random_bool(0.2) {
                        0
                    } else {
                        rng.random_range(0..60)
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn mi_and_chi_square_match_plug_in_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..500 {
        let t = random_table(&mut rng);
        let mi = mutual_info_from_counts(&t);
        let chi = chi_square_from_counts(&t);
        assert!((mi - mutual_info_oracle(&t)).abs() < 1e-10, "{t:?}");
        assert!(
            (chi - chi_square_oracle(&t)).abs() < 1e-10 * chi.max(1.0),
            "{t:?}"
        );
    }
}

#[test]
fn perfect_two_by_two_association() {
    let t = vec![vec![20, 0], vec![0, 20]];
    assert_eq!(chi_square_from_counts(&t), 40.0);
    assert!((mutual_info_from_counts(&t) - std::f64::consts::LN_2).abs() < 1e-15);
    assert_eq!(chi_square_from_counts(&[vec![5, 5], vec![5, 5]]), 0.0);
}

#[test]
fn dataset_scorers_use_binned_contingency() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let d = separable_dataset(60, 5, 2, 3.0, &mut rng);
    let mi = mutual_info_scores(&d, 10);
    let chi = chi_square_scores(&d, 10);
    for j in 0..5 {
        let col: Vec<f64> = d.values().column(j).to_vec();
        let t = contingency(&discretize(&col, 10), d.labels(), 10);
        assert!((mi.entries[j].1 - mutual_info_oracle(&t)).abs() < 1e-10);
        assert!((chi.entries[j].1 - chi_square_oracle(&t)).abs() < 1e-9);
    }
    let top = select_k_best(&mi, 2).unwrap();
    let mut top = top;
    top.sort();
    assert_eq!(top, vec!["f0", "f1"]);
}

#[test]
fn p_values_match_density_quadrature() {
    for &df in &[1.0, 2.5, 5.0, 10.0, 37.0, 200.0] {
        for &t in &[0.1, 0.7, 1.5, 2.0, 3.3, -4.0, 8.0] {
            let got = p_value(t, df).unwrap();
            let want = t_tail_oracle(t, df);
            assert!((got - want).abs() < 1e-9, "t={t} df={df}: {got} vs {want}");
        }
    }
    assert_eq!(p_value(0.0, 4.0).unwrap(), 1.0);
    assert_eq!(p_value(f64::INFINITY, 4.0).unwrap(), 0.0);
    assert!(p_value(1.0, 0.0).is_err());
    assert!(p_value(f64::NAN, 3.0).is_err());
}

fn two_group(a: &[f64], b: &[f64]) -> LabeledDataset {
    let n = a.len() + b.len();
    let values = Array2::from_shape_fn(
        (n, 1),
        |(i, _)| if i < a.len() { a[i] } else { b[i - a.len()] },
    );
    let labels = (0..n).map(|i| u8::from(i >= a.len())).collect();
    LabeledDataset::new(
        vec!["g".into()],
        (0..n).map(|i| format!("s{i}")).collect(),
        values,
        labels,
    )
    .unwrap()
}

#[test]
fn t_statistics_follow_hand_formulas() {
    let lusc = [1.0, 2.0, 3.0, 4.0];
    let luad = [2.0, 4.0, 6.0, 8.0, 10.0];
    let d = two_group(&lusc, &luad);
    let (m1, m2): (f64, f64) = (2.5, 6.0);
    let (v1, v2): (f64, f64) = (5.0 / 3.0, 10.0);
    let (n1, n2): (f64, f64) = (4.0, 5.0);

    let w = &t_statistic(&d, TMode::Welch).unwrap()[0];
    let se2 = v1 / n1 + v2 / n2;
    let t_w = (m1 - m2) / se2.sqrt();
    let df_w = se2 * se2 / ((v1 / n1).powi(2) / (n1 - 1.0) + (v2 / n2).powi(2) / (n2 - 1.0));
    assert!((w.t_stat - t_w).abs() < 1e-12);
    assert!((w.p_value - t_tail_oracle(t_w, df_w)).abs() < 1e-9);

    let p = &t_statistic(&d, TMode::Paper).unwrap()[0];
    let t_p = (m1 - m2) / (v1.sqrt() + v2.sqrt());
    assert!((p.t_stat - t_p).abs() < 1e-12);
    assert!((p.p_value - t_tail_oracle(t_p, n1 + n2 - 2.0)).abs() < 1e-9);
}

#[test]
fn pca_scores_match_jacobi_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for trial in 0..20 {
        let (n, p) = (rng.random_range(8..30), rng.random_range(2..9));
        let x = Array2::from_shape_fn((n, p), |(i, j)| {
            rng.random_range(-1.0..1.0) + (i as f64) * 0.05 * (j % 3) as f64
        });
        let d = LabeledDataset::new(
            (0..p).map(|j| format!("f{j}")).collect(),
            (0..n).map(|i| format!("s{i}")).collect(),
            x.clone(),
            (0..n).map(|i| (i % 2) as u8).collect(),
        )
        .unwrap();
        let k = 1 + trial % p;
        let got = pca_feature_scores(&d, k).unwrap();
        let want = pca_scores_oracle(&x, k);
        for j in 0..p {
            assert!((got.entries[j].1 - want[j]).abs() < 1e-9, "trial {trial}");
        }
    }
}

#[test]
fn venn_partition_counts_method_membership() {
    let sets = vec![
        vec!["a".to_string(), "b".into()],
        vec!["b".into(), "c".into()],
        vec!["b".into()],
        vec!["d".into()],
    ];
    let v = venn_partition(&sets).unwrap();
    let mut u = v.unique.clone();
    u.sort();
    assert_eq!(u, vec!["a", "b", "c", "d"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_best_is_a_top_k_prefix(scores in prop::collection::vec(-1e3f64..1e3, 1..40), k in 0usize..50) {
        let t = ScoreTable::new(
            Method::MutualInfo,
            scores.iter().enumerate().map(|(i, s)| (format!("f{i:02}"), *s)).collect(),
        );
        match select_k_best(&t, k) {
            Ok(picked) => {
                prop_assert_eq!(picked.len(), k.min(scores.len()));
                let min_in = picked.iter().map(|id| scores[id[1..].parse::<usize>().unwrap()]).fold(f64::INFINITY, f64::min);
                let outside = (0..scores.len()).filter(|i| !picked.contains(&format!("f{i:02}")));
                for i in outside {
                    prop_assert!(scores[i] <= min_in);
                }
            }
            Err(_) => prop_assert!(k > scores.len()),
        }
    }

    #[test]
    fn mi_is_bounded_by_label_entropy(cells in prop::collection::vec((0u64..50, 0u64..50), 1..10)) {
        let t: Vec<Vec<u64>> = cells.iter().map(|&(a, b)| vec![a, b]).collect();
        let mi = mutual_info_from_counts(&t);
        let col: Vec<u64> = vec![cells.iter().map(|c| c.0).sum(), cells.iter().map(|c| c.1).sum()];
        let n = (col[0] + col[1]) as f64;
        let h: f64 = col.iter().filter(|&&k| k > 0).map(|&k| { let p = k as f64 / n; -p * p.ln() }).sum();
        prop_assert!(mi >= 0.0 && mi <= h + 1e-12);
        prop_assert!(chi_square_from_counts(&t) >= -1e-9);
    }
}
