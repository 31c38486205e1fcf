//! Hybrid quantum-classical binary classifier.
//!
//! `x → amplitude encoding → depth × (Rot on every qubit, CZ chain) →
//! ⟨Z_q⟩ per qubit → dense(dense_width, ReLU) → dense(1) → sigmoid`.
//!
//! Angle gradients use the parameter-shift rule on each of θ, φ, λ; the
//! dense head is differentiated by backpropagation.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use ndarray::{Array2, ArrayView2, Axis};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adam::{adam_step, AdamConfig, AdamState};
use crate::classifier::BinaryClassifier;
use crate::error::{Error, Result};
use crate::omics_io::LabeledDataset;
use crate::quantum::{amplitude_encode, RotParams, Statevector};
use crate::scaling::{Scaler, ScalerKind};
use crate::seeding::derive_seed;

/// Probability clamp used by the loss.
pub const PROB_EPS: f64 = 1e-7;

type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnnConfig {
    pub n_features: usize,
    pub n_qubits: usize,
    pub depth: usize,
    pub dense_width: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Stratified fraction of the training data held out for picking the
    /// best-validation-loss checkpoint. 0 keeps the final parameters.
    pub validation_fraction: f64,
    pub scaler: ScalerKind,
}

impl QnnConfig {
    pub fn new(n_features: usize, depth: usize, dense_width: usize) -> Result<Self> {
        if n_features < 2 || !n_features.is_power_of_two() {
            return Err(Error::invalid(format!(
                "n_features = {n_features} must be a power of two >= 2"
            )));
        }
        let cfg = Self {
            n_features,
            n_qubits: n_features.trailing_zeros() as usize,
            depth,
            dense_width,
            seed: 42,
            learning_rate: 0.01,
            batch_size: 16,
            epochs: 100,
            validation_fraction: 0.2,
            scaler: ScalerKind::MinMax,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Named architectures: `qnn256` (8 qubits), `qnn64` (6), `qnn32` (5),
    /// all depth 5 with a dense layer as wide as the input.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "qnn256" => Self::new(256, 5, 256),
            "qnn64" => Self::new(64, 5, 64),
            "qnn32" => Self::new(32, 5, 32),
            other => Err(Error::invalid(format!("unknown QNN preset {other:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits >= usize::BITS as usize {
            return Err(Error::invalid("n_qubits out of range"));
        }
        if 1usize << self.n_qubits != self.n_features {
            return Err(Error::invalid(format!(
                "2^{} != n_features {}",
                self.n_qubits, self.n_features
            )));
        }
        if self.depth == 0 || self.dense_width == 0 {
            return Err(Error::invalid("depth and dense_width must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::invalid("validation_fraction must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn n_gates(&self) -> usize {
        self.depth * self.n_qubits
    }

    pub fn n_angles(&self) -> usize {
        3 * self.n_gates()
    }

    pub fn n_params(&self) -> usize {
        self.n_angles() + self.dense_width * (self.n_qubits + 2) + 1
    }
}

/// Trainable parameters. Flat order: angles `(layer, qubit, [θ, φ, λ])`,
/// then `w1` row-major, `b1`, `w2`, `b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnnParams {
    /// `depth × n_qubits` rotation triples.
    pub angles: Vec<Vec<RotParams>>,
    /// `dense_width × n_qubits` hidden-layer weights.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl QnnParams {
    pub fn zeros(cfg: &QnnConfig) -> Self {
        Self {
            angles: vec![vec![RotParams::default(); cfg.n_qubits]; cfg.depth],
            w1: vec![vec![0.0; cfg.n_qubits]; cfg.dense_width],
            b1: vec![0.0; cfg.dense_width],
            w2: vec![0.0; cfg.dense_width],
            b2: 0.0,
        }
    }

    /// Angles uniform on `[−π, π)`, weights uniform on `±1/sqrt(fan_in)`,
    /// biases zero.
    pub fn init(cfg: &QnnConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zeros(cfg);
        for layer in &mut p.angles {
            for r in layer.iter_mut() {
                *r = RotParams::new(
                    rng.random_range(-PI..PI),
                    rng.random_range(-PI..PI),
                    rng.random_range(-PI..PI),
                );
            }
        }
        let a1 = 1.0 / (cfg.n_qubits as f64).sqrt();
        for row in &mut p.w1 {
            for w in row.iter_mut() {
                *w = rng.random_range(-a1..a1);
            }
        }
        let a2 = 1.0 / (cfg.dense_width as f64).sqrt();
        for w in &mut p.w2 {
            *w = rng.random_range(-a2..a2);
        }
        p
    }

    pub fn check(&self, cfg: &QnnConfig) -> Result<()> {
        let shape_ok = self.angles.len() == cfg.depth
            && self.angles.iter().all(|l| l.len() == cfg.n_qubits)
            && self.w1.len() == cfg.dense_width
            && self.w1.iter().all(|r| r.len() == cfg.n_qubits)
            && self.b1.len() == cfg.dense_width
            && self.w2.len() == cfg.dense_width;
        if !shape_ok {
            return Err(Error::invalid("parameter shapes do not match the config"));
        }
        if !self.to_flat().iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("non-finite parameter"));
        }
        Ok(())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for r in self.angles.iter().flatten() {
            out.extend([r.theta, r.phi, r.lambda]);
        }
        out.extend(self.w1.iter().flatten());
        out.extend(&self.b1);
        out.extend(&self.w2);
        out.push(self.b2);
        out
    }

    pub fn from_flat(cfg: &QnnConfig, flat: &[f64]) -> Result<Self> {
        if flat.len() != cfg.n_params() {
            return Err(Error::Shape {
                expected: cfg.n_params(),
                actual: flat.len(),
            });
        }
        let (nq, w) = (cfg.n_qubits, cfg.dense_width);
        let mut it = flat.iter().copied();
        let mut next = || it.next().expect("length checked above");
        let angles = (0..cfg.depth)
            .map(|_| {
                (0..nq)
                    .map(|_| RotParams::new(next(), next(), next()))
                    .collect()
            })
            .collect();
        let w1 = (0..w).map(|_| (0..nq).map(|_| next()).collect()).collect();
        let b1 = (0..w).map(|_| next()).collect();
        let w2 = (0..w).map(|_| next()).collect();
        let b2 = next();
        Ok(Self {
            angles,
            w1,
            b1,
            w2,
            b2,
        })
    }
}

fn gate_mats(p: &QnnParams) -> Vec<Mat2> {
    p.angles.iter().flatten().map(|r| r.matrix()).collect()
}

fn shifted(r: RotParams, k: usize, delta: f64) -> RotParams {
    let mut s = r;
    match k {
        0 => s.theta += delta,
        1 => s.phi += delta,
        _ => s.lambda += delta,
    }
    s
}

/// Apply gates `from..` (CZ chain after the last qubit of each layer),
/// optionally substituting the matrix of one gate.
fn run_circuit(
    psi: &mut Statevector,
    mats: &[Mat2],
    n_qubits: usize,
    from: usize,
    swap: Option<(usize, &Mat2)>,
) -> Result<()> {
    for (g, m) in mats.iter().enumerate().skip(from) {
        let m = match swap {
            Some((s, alt)) if s == g => alt,
            _ => m,
        };
        run_step(psi, m, g, n_qubits)?;
    }
    Ok(())
}

fn check_input(cfg: &QnnConfig, z: &[f64]) -> Result<()> {
    if z.len() != cfg.n_features {
        return Err(Error::Shape {
            expected: cfg.n_features,
            actual: z.len(),
        });
    }
    Ok(())
}

struct HeadPass {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    p: f64,
}

fn head_forward(p: &QnnParams, e: &[f64]) -> HeadPass {
    let pre: Vec<f64> =
        p.w1.iter()
            .zip(&p.b1)
            .map(|(row, b)| row.iter().zip(e).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect();
    let hidden: Vec<f64> = pre.iter().map(|a| a.max(0.0)).collect();
    let z = hidden.iter().zip(&p.w2).map(|(h, w)| h * w).sum::<f64>() + p.b2;
    HeadPass {
        pre,
        hidden,
        p: sigmoid(z),
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Per-qubit `⟨Z⟩` after encoding `z` and running the circuit.
pub fn circuit_expvals(cfg: &QnnConfig, params: &QnnParams, z: &[f64]) -> Result<Vec<f64>> {
    check_input(cfg, z)?;
    let mut psi = amplitude_encode(z)?;
    run_circuit(&mut psi, &gate_mats(params), cfg.n_qubits, 0, None)?;
    Ok(psi.expvals_z())
}

/// Class-1 probability for an already scaled input vector.
pub fn forward(cfg: &QnnConfig, params: &QnnParams, z: &[f64]) -> Result<f64> {
    let e = circuit_expvals(cfg, params, z)?;
    Ok(head_forward(params, &e).p)
}

fn sample_loss(p: f64, y: u8) -> f64 {
    let pc = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    if y == 1 {
        -pc.ln()
    } else {
        -(1.0 - pc).ln()
    }
}

/// Mean binary cross-entropy with predictions clamped to `[ε, 1 − ε]`.
pub fn bce_loss(preds: &[f64], labels: &[u8]) -> Result<f64> {
    if preds.len() != labels.len() {
        return Err(Error::Shape {
            expected: preds.len(),
            actual: labels.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    Ok(preds
        .iter()
        .zip(labels)
        .map(|(&p, &y)| sample_loss(p, y))
        .sum::<f64>()
        / preds.len() as f64)
}

struct Prepared {
    mats: Vec<Mat2>,
    /// `[plus, minus]` matrices per angle in flat order.
    shifts: Vec<[Mat2; 2]>,
}

fn prepare(cfg: &QnnConfig, params: &QnnParams) -> Prepared {
    let mut shifts = Vec::with_capacity(cfg.n_angles());
    for r in params.angles.iter().flatten() {
        for k in 0..3 {
            shifts.push([
                shifted(*r, k, FRAC_PI_2).matrix(),
                shifted(*r, k, -FRAC_PI_2).matrix(),
            ]);
        }
    }
    Prepared {
        mats: gate_mats(params),
        shifts,
    }
}

/// Loss and flat gradient for one sample.
fn sample_gradient(
    cfg: &QnnConfig,
    params: &QnnParams,
    prep: &Prepared,
    z: &[f64],
    y: u8,
) -> Result<(f64, Vec<f64>)> {
    check_input(cfg, z)?;
    let nq = cfg.n_qubits;
    let mut psi = amplitude_encode(z)?;
    let mut prefix = Vec::with_capacity(cfg.n_gates());
    for g in 0..cfg.n_gates() {
        prefix.push(psi.clone());
        run_step(&mut psi, &prep.mats[g], g, nq)?;
    }
    let e = psi.expvals_z();
    let head = head_forward(params, &e);
    let loss = sample_loss(head.p, y);

    let mut grad = vec![0.0; cfg.n_params()];
    let clamped = head.p < PROB_EPS || head.p > 1.0 - PROB_EPS;
    let dz = if clamped { 0.0 } else { head.p - f64::from(y) };
    if dz == 0.0 {
        return Ok((loss, grad));
    }
    let w = cfg.dense_width;
    let base = cfg.n_angles();
    let (w1_at, b1_at, w2_at, b2_at) = (
        base,
        base + w * nq,
        base + w * nq + w,
        base + w * nq + 2 * w,
    );
    grad[b2_at] = dz;
    let mut de = vec![0.0; nq];
    for k in 0..w {
        grad[w2_at + k] = dz * head.hidden[k];
        let da = if head.pre[k] > 0.0 {
            dz * params.w2[k]
        } else {
            0.0
        };
        grad[b1_at + k] = da;
        for q in 0..nq {
            grad[w1_at + k * nq + q] = da * e[q];
            de[q] += da * params.w1[k][q];
        }
    }
    if de.iter().all(|&v| v == 0.0) {
        return Ok((loss, grad));
    }
    for g in 0..cfg.n_gates() {
        for k in 0..3 {
            let a = 3 * g + k;
            let mut diff = 0.0;
            for (sign, m) in [(1.0, &prep.shifts[a][0]), (-1.0, &prep.shifts[a][1])] {
                let mut s = prefix[g].clone();
                run_circuit(&mut s, &prep.mats, nq, g, Some((g, m)))?;
                let ev = s.expvals_z();
                diff += sign * ev.iter().zip(&de).map(|(v, d)| v * d).sum::<f64>();
            }
            grad[a] = 0.5 * diff;
        }
    }
    Ok((loss, grad))
}

fn run_step(psi: &mut Statevector, m: &Mat2, g: usize, nq: usize) -> Result<()> {
    let q = g % nq;
    psi.apply_single(q, m)?;
    if q == nq - 1 {
        for c in 1..nq {
            psi.apply_cz(c - 1, c)?;
        }
    }
    Ok(())
}

fn row_vec(x: ArrayView2<'_, f64>, i: usize) -> Vec<f64> {
    x.row(i).to_vec()
}

fn batch_gradient_flat(
    cfg: &QnnConfig,
    params: &QnnParams,
    x: ArrayView2<'_, f64>,
    labels: &[u8],
) -> Result<(f64, Vec<f64>)> {
    if x.nrows() != labels.len() {
        return Err(Error::Shape {
            expected: x.nrows(),
            actual: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    let prep = prepare(cfg, params);
    let per_sample: Vec<(f64, Vec<f64>)> = (0..labels.len())
        .into_par_iter()
        .map(|i| sample_gradient(cfg, params, &prep, &row_vec(x, i), labels[i]))
        .collect::<Result<_>>()?;
    // fixed-order reduction keeps results independent of scheduling
    let mut loss = 0.0;
    let mut grad = vec![0.0; cfg.n_params()];
    for (l, g) in &per_sample {
        loss += l;
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v;
        }
    }
    let n = labels.len() as f64;
    grad.iter_mut().for_each(|v| *v /= n);
    Ok((loss / n, grad))
}

/// Mean loss over a batch of scaled inputs and its gradient, shaped like the
/// parameters.
pub fn gradients(
    cfg: &QnnConfig,
    params: &QnnParams,
    x: ArrayView2<'_, f64>,
    labels: &[u8],
) -> Result<(f64, QnnParams)> {
    let (loss, flat) = batch_gradient_flat(cfg, params, x, labels)?;
    Ok((loss, QnnParams::from_flat(cfg, &flat)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QnnModel {
    pub config: QnnConfig,
    pub scaler: Scaler,
    pub params: QnnParams,
}

impl QnnModel {
    pub fn new(config: QnnConfig, scaler: Scaler, params: QnnParams) -> Result<Self> {
        config.validate()?;
        params.check(&config)?;
        if scaler.n_features() != config.n_features {
            return Err(Error::Shape {
                expected: config.n_features,
                actual: scaler.n_features(),
            });
        }
        Ok(Self {
            config,
            scaler,
            params,
        })
    }
}

impl BinaryClassifier for QnnModel {
    fn n_features(&self) -> usize {
        self.config.n_features
    }

    fn scaler(&self) -> &Scaler {
        &self.scaler
    }

    fn predict_scaled(&self, z: &[f64]) -> Result<f64> {
        forward(&self.config, &self.params, z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters were returned (1-based; 0 = initial).
    pub best_epoch: usize,
}

impl TrainHistory {
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "epoch\ttrain_loss\ttrain_accuracy\tval_loss\tval_accuracy"
        )?;
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());
        for r in &self.epochs {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                r.epoch,
                r.train_loss,
                r.train_accuracy,
                opt(r.val_loss),
                opt(r.val_accuracy)
            )?;
        }
        Ok(())
    }
}

fn evaluate(cfg: &QnnConfig, p: &QnnParams, x: &Array2<f64>, y: &[u8]) -> Result<(f64, f64)> {
    let preds: Vec<f64> = (0..y.len())
        .into_par_iter()
        .map(|i| forward(cfg, p, &row_vec(x.view(), i)))
        .collect::<Result<_>>()?;
    let correct = preds
        .iter()
        .zip(y)
        .filter(|(&p, &t)| u8::from(p >= 0.5) == t)
        .count();
    Ok((bce_loss(&preds, y)?, correct as f64 / y.len() as f64))
}

/// Minibatch Adam training. A stratified `validation_fraction` of `data`
/// is held out (split seeded by `cfg.seed`) and the parameters with the
/// lowest validation loss are returned. The scaler is fitted on the
/// remaining rows only.
pub fn train(cfg: &QnnConfig, data: &LabeledDataset) -> Result<(QnnModel, TrainHistory)> {
    cfg.validate()?;
    if data.n_features() != cfg.n_features {
        return Err(Error::Shape {
            expected: cfg.n_features,
            actual: data.n_features(),
        });
    }
    if !data.has_both_classes() {
        return Err(Error::invalid("training data must contain both classes"));
    }
    let (fit, val) = if cfg.validation_fraction > 0.0 {
        let s = data.stratified_split(cfg.validation_fraction, cfg.seed)?;
        (s.train, Some(s.test))
    } else {
        (data.clone(), None)
    };
    let scaler = Scaler::fit(cfg.scaler, fit.values().view())?;
    let x_fit = scaler.transform(fit.values().view())?;
    let x_val = match &val {
        Some(v) => Some((scaler.transform(v.values().view())?, v.labels().to_vec())),
        None => None,
    };

    let params = QnnParams::init(cfg, derive_seed(cfg.seed, b"qnn-init"));
    let mut history = TrainHistory::default();
    if cfg.epochs == 0 {
        return Ok((QnnModel::new(cfg.clone(), scaler, params)?, history));
    }

    let adam = AdamConfig {
        learning_rate: cfg.learning_rate,
        ..AdamConfig::default()
    };
    let mut state = AdamState::new(cfg.n_params());
    let mut flat = params.to_flat();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, b"qnn-shuffle"));
    let mut order: Vec<usize> = (0..fit.n_samples()).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let current = QnnParams::from_flat(cfg, &flat)?;
            let xb = x_fit.select(Axis(0), batch);
            let yb: Vec<u8> = batch.iter().map(|&i| fit.labels()[i]).collect();
            let (_, g) = batch_gradient_flat(cfg, &current, xb.view(), &yb)?;
            adam_step(&mut flat, &g, &mut state, &adam)?;
        }
        let current = QnnParams::from_flat(cfg, &flat)?;
        let (train_loss, train_accuracy) = evaluate(cfg, &current, &x_fit, fit.labels())?;
        let (val_loss, val_accuracy) = match &x_val {
            Some((xv, yv)) => {
                let (l, a) = evaluate(cfg, &current, xv, yv)?;
                (Some(l), Some(a))
            }
            None => (None, None),
        };
        let score = val_loss.unwrap_or(train_loss);
        if x_val.is_none() || best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, flat.clone()));
            history.best_epoch = epoch;
        }
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            train_accuracy,
            val_loss,
            val_accuracy,
        });
    }
    let (_, chosen) = best.expect("at least one epoch ran");
    let params = QnnParams::from_flat(cfg, &chosen)?;
    Ok((QnnModel::new(cfg.clone(), scaler, params)?, history))
}

/// Label 1 iff the model's probability is at least `threshold`.
pub fn predict_labels(model: &QnnModel, x: ArrayView2<'_, f64>, threshold: f64) -> Result<Vec<u8>> {
    model.predict_labels(x, threshold)
}
