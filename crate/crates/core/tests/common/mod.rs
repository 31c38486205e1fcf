//! Independent reference implementations used by the integration tests and
//! the acceptance target. Each one is deliberately naive and written in a
//! different form from the library code it checks.

#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

use mqml::omics_io::LabeledDataset;
use mqml::qnn::{QnnConfig, QnnParams};

pub type C = Complex64;
pub type Dense = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn quick_config() -> mqml::pipeline::PipelineConfig {
    mqml::pipeline::PipelineConfig::load(workspace_root().join("configs/quick.toml")).unwrap()
}

// ---------------------------------------------------------------- linear algebra

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| c(f64::from(u8::from(i == j)), 0.0))
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Matrix exponential by a truncated Taylor series with scaling and squaring.
pub fn expm(a: &Dense) -> Dense {
    let n = a.len();
    let norm: f64 = a
        .iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = 0.5f64.powi(squarings);
    let a: Dense = a
        .iter()
        .map(|r| r.iter().map(|x| x * scale).collect())
        .collect();
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..30 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

fn pauli_y() -> Dense {
    vec![
        vec![c(0.0, 0.0), c(0.0, -1.0)],
        vec![c(0.0, 1.0), c(0.0, 0.0)],
    ]
}

fn pauli_z() -> Dense {
    vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(-1.0, 0.0)],
    ]
}

/// `exp(−i·a/2·P)` for a Pauli matrix `P`.
fn pauli_rotation(p: &Dense, a: f64) -> Dense {
    let g: Dense = p
        .iter()
        .map(|r| r.iter().map(|x| x * c(0.0, -a / 2.0)).collect())
        .collect();
    expm(&g)
}

/// `Rz(λ)·Ry(θ)·Rz(φ)` built from generator exponentials.
pub fn rot_oracle(theta: f64, phi: f64, lambda: f64) -> Dense {
    let rz_l = pauli_rotation(&pauli_z(), lambda);
    let ry = pauli_rotation(&pauli_y(), theta);
    let rz_p = pauli_rotation(&pauli_z(), phi);
    matmul(&rz_l, &matmul(&ry, &rz_p))
}

/// Full `2^n` operator for a one-qubit gate, qubit 0 being the leftmost
/// tensor factor.
pub fn embed_single(n: usize, q: usize, g: &Dense) -> Dense {
    let id = identity(2);
    let mut out = vec![vec![c(1.0, 0.0)]];
    for k in 0..n {
        out = kron(&out, if k == q { g } else { &id });
    }
    out
}

/// `CZ = |0⟩⟨0|⊗I + |1⟩⟨1|⊗Z` on qubits `a` and `b`, built from projectors.
pub fn embed_cz(n: usize, a: usize, b: usize) -> Dense {
    let p0 = vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0)],
    ];
    let p1 = vec![
        vec![c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0)],
    ];
    let term = |pa: &Dense, zb: bool| {
        let mut out = vec![vec![c(1.0, 0.0)]];
        for k in 0..n {
            let f = if k == a {
                pa.clone()
            } else if k == b && zb {
                pauli_z()
            } else {
                identity(2)
            };
            out = kron(&out, &f);
        }
        out
    };
    let x = term(&p0, false);
    let y = term(&p1, true);
    x.iter()
        .zip(&y)
        .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u + v).collect())
        .collect()
}

/// Dense unitary of the whole ansatz (rotation layer, then linear CZ chain,
/// repeated per layer).
pub fn ansatz_unitary(n: usize, angles: &[Vec<[f64; 3]>]) -> Dense {
    let mut u = identity(1 << n);
    for layer in angles {
        for (q, &[t, p, l]) in layer.iter().enumerate() {
            u = matmul(&embed_single(n, q, &rot_oracle(t, p, l)), &u);
        }
        for q in 1..n {
            u = matmul(&embed_cz(n, q - 1, q), &u);
        }
    }
    u
}

/// `⟨ψ|Z_q|ψ⟩` through the dense observable.
pub fn expval_z_dense(n: usize, q: usize, psi: &[C]) -> f64 {
    let zpsi = matvec(&embed_single(n, q, &pauli_z()), psi);
    psi.iter().zip(&zpsi).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Hybrid forward pass built on the dense circuit.
pub fn forward_oracle(cfg: &QnnConfig, p: &QnnParams, z: &[f64]) -> f64 {
    let n = cfg.n_qubits;
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let psi0: Vec<C> = z.iter().map(|v| c(v / norm, 0.0)).collect();
    let angles: Vec<Vec<[f64; 3]>> = p
        .angles
        .iter()
        .map(|l| l.iter().map(|r| [r.theta, r.phi, r.lambda]).collect())
        .collect();
    let psi = matvec(&ansatz_unitary(n, &angles), &psi0);
    let e: Vec<f64> = (0..n).map(|q| expval_z_dense(n, q, &psi)).collect();
    let mut logit = p.b2;
    for (k, row) in p.w1.iter().enumerate() {
        let h = p.b1[k] + row.iter().zip(&e).map(|(w, x)| w * x).sum::<f64>();
        logit += p.w2[k] * h.max(0.0);
    }
    1.0 / (1.0 + (-logit).exp())
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> Vec<C> {
    let v: Vec<C> = (0..1 << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- statistics

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&k| k > 0)
        .map(|&k| {
            let p = k as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `I(X;Y) = H(X) + H(Y) − H(X,Y)` by summing over every cell.
pub fn mutual_info_oracle(t: &[Vec<u64>]) -> f64 {
    let n: u64 = t.iter().flatten().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let rows: Vec<u64> = t.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..t[0].len())
        .map(|j| t.iter().map(|r| r[j]).sum())
        .collect();
    let joint: Vec<u64> = t.iter().flatten().copied().collect();
    (entropy(&rows, n) + entropy(&cols, n) - entropy(&joint, n)).max(0.0)
}

/// `χ² = N·(Σ O²/(R·C) − 1)` over cells with non-zero margins.
pub fn chi_square_oracle(t: &[Vec<u64>]) -> f64 {
    let n: u64 = t.iter().flatten().sum();
    if n == 0 {
        return 0.0;
    }
    let rows: Vec<u64> = t.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..t[0].len())
        .map(|j| t.iter().map(|r| r[j]).sum())
        .collect();
    let nz_rows = rows.iter().filter(|&&r| r > 0).count();
    let nz_cols = cols.iter().filter(|&&c| c > 0).count();
    if nz_rows < 2 || nz_cols < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for (i, r) in t.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            if rows[i] > 0 && cols[j] > 0 {
                s += (o * o) as f64 / (rows[i] * cols[j]) as f64;
            }
        }
    }
    n as f64 * (s - 1.0)
}

/// Two-sided Student-t tail by composite Simpson integration of the
/// unnormalised density: `∫_{|t|}^∞ f / ∫_0^∞ f`, which needs no gamma
/// function.
pub fn t_tail_oracle(t: f64, df: f64) -> f64 {
    let dens = |x: f64| (-(df + 1.0) / 2.0 * (x * x / df).ln_1p()).exp();
    // x = a + u/(1−u) maps [a, ∞) onto [0, 1)
    let integral = |a: f64| {
        let f = |u: f64| {
            if u >= 1.0 {
                // f ~ df^((df+1)/2)·w^(df−1) as w → 0
                if df == 1.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                let w = 1.0 - u;
                dens(a + u / w) / (w * w)
            }
        };
        let m = 400_000;
        let h = 1.0 / m as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..m {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    integral(t.abs()) / integral(0.0)
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic
/// Jacobi rotations.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = cs * vp - sn * vq;
                    row[q] = sn * vp + cs * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Variance-weighted absolute loadings through the Jacobi oracle.
pub fn pca_scores_oracle(x: &Array2<f64>, k: usize) -> Vec<f64> {
    let (n, p) = x.dim();
    let z: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| x[[i, j]]).collect();
            let m = col.iter().sum::<f64>() / n as f64;
            let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
            col.iter().map(|v| (v - m) / sd).collect()
        })
        .collect();
    let cov: Vec<Vec<f64>> = (0..p)
        .map(|a| {
            (0..p)
                .map(|b| (0..n).map(|i| z[a][i] * z[b][i]).sum::<f64>() / (n as f64 - 1.0))
                .collect()
        })
        .collect();
    let (vals, vecs) = jacobi_eigen(&cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let total: f64 = vals.iter().map(|l| l.max(0.0)).sum();
    let mut s = vec![0.0; p];
    for &cidx in order.iter().take(k) {
        for (j, sj) in s.iter_mut().enumerate() {
            *sj += vals[cidx].max(0.0) * vecs[j][cidx].abs() / total;
        }
    }
    s
}

// ---------------------------------------------------------------- clustering

/// One merge of the naive oracle: the two cluster ids and the height.
#[derive(Debug, Clone, Copy)]
pub struct NaiveMerge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// Agglomerative Ward clustering straight from centroids: at each step scan
/// every pair, merge the one minimising
/// `sqrt(2·|A|·|B| / (|A|+|B|))·‖c_A − c_B‖`. New clusters get id `n + step`.
pub fn naive_ward(points: &[Vec<f64>]) -> Vec<NaiveMerge> {
    let n = points.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let centroid = |m: &[usize]| -> Vec<f64> {
        let d = points[0].len();
        (0..d)
            .map(|k| m.iter().map(|&i| points[i][k]).sum::<f64>() / m.len() as f64)
            .collect()
    };
    let mut out = Vec::new();
    for step in 0..n - 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (ca, cb) = (centroid(&clusters[i].1), centroid(&clusters[j].1));
                let (na, nb) = (clusters[i].1.len() as f64, clusters[j].1.len() as f64);
                let dist = ca
                    .iter()
                    .zip(&cb)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let h = (2.0 * na * nb / (na + nb)).sqrt() * dist;
                if h < best.0 {
                    best = (h, i, j);
                }
            }
        }
        let (h, i, j) = best;
        let (idb, mb) = clusters.remove(j);
        let (ida, ma) = clusters.remove(i);
        out.push(NaiveMerge {
            a: ida.min(idb),
            b: ida.max(idb),
            height: h,
        });
        clusters.push((n + step, [ma, mb].concat()));
    }
    out
}

// ---------------------------------------------------------------- metrics

/// AUC by counting every positive/negative pair.
pub fn auc_pairs_oracle(labels: &[u8], scores: &[f64]) -> f64 {
    let mut twice = 0u64;
    let mut pairs = 0u64;
    for (i, &li) in labels.iter().enumerate() {
        if li != 1 {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj != 0 {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                twice += 2;
            } else if scores[i] == scores[j] {
                twice += 1;
            }
        }
    }
    twice as f64 / (2 * pairs) as f64
}

// ---------------------------------------------------------------- data

/// Two-class dataset whose first `informative` columns shift by `effect`
/// standard deviations between the classes.
pub fn separable_dataset(
    n: usize,
    p: usize,
    informative: usize,
    effect: f64,
    rng: &mut impl Rng,
) -> LabeledDataset {
    use rand_distr::{Distribution, StandardNormal};
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let values = Array2::from_shape_fn((n, p), |(i, j)| {
        let e: f64 = StandardNormal.sample(rng);
        let shift = if j < informative && labels[i] == 1 {
            effect
        } else {
            0.0
        };
        5.0 + e + shift
    });
    LabeledDataset::new(
        (0..p).map(|j| format!("f{j}")).collect(),
        (0..n).map(|i| format!("s{i}")).collect(),
        values,
        labels,
    )
    .unwrap()
}

/// Single-omic synthetic cohort: `per_class` samples per subtype, `p`
/// features of which half shift by `effect` noise units.
pub fn synthetic_cohort(per_class: usize, p: usize, effect: f64, seed: u64) -> LabeledDataset {
    use mqml::omics_io::{
        generate_synthetic_cohort, join_clinical, OmicKind, OmicSynthSpec, SyntheticSpec,
    };
    let spec = SyntheticSpec {
        samples_per_class: per_class,
        omics: vec![OmicSynthSpec {
            informative_fraction: 0.5,
            effect_min: effect,
            effect_max: effect,
            ..OmicSynthSpec::new(OmicKind::RnaSeq, p)
        }],
    };
    let cohort = generate_synthetic_cohort(&spec, seed).unwrap();
    join_clinical(&cohort.omics[0], &cohort.clinical).unwrap()
}

pub fn accuracy(labels: &[u8], preds: &[u8]) -> f64 {
    labels.iter().zip(preds).filter(|(a, b)| a == b).count() as f64 / labels.len() as f64
}
