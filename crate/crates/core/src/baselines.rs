//! Classical comparators: L2 logistic regression, a one-hidden-layer MLP
//! and a random forest.

use ndarray::{Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adam::{adam_step, AdamConfig, AdamState};
use crate::classifier::BinaryClassifier;
use crate::error::{Error, Result};
use crate::forest::{Criterion, ForestParams, MaxFeatures, RandomForest};
use crate::omics_io::LabeledDataset;
use crate::qnn::{bce_loss, sigmoid};
use crate::scaling::{Scaler, ScalerKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Lr,
    Mlp,
    Rf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrConfig {
    /// Inverse L2 strength.
    pub c: f64,
    pub iters: usize,
    pub learning_rate: f64,
    /// Stop once the gradient norm drops below this.
    pub tol: f64,
    pub scaler: ScalerKind,
}

impl Default for LrConfig {
    fn default() -> Self {
        Self {
            c: 0.1,
            iters: 1000,
            learning_rate: 0.1,
            tol: 1e-6,
            scaler: ScalerKind::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub iters: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub scaler: ScalerKind,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            iters: 500,
            learning_rate: 0.01,
            seed: 42,
            scaler: ScalerKind::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub criterion: Criterion,
    pub seed: u64,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            criterion: Criterion::Entropy,
            seed: 42,
        }
    }
}

/// One ReLU hidden layer and a sigmoid output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNet {
    /// `hidden × n_features`.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpNet {
    /// Hidden weights uniform on `±1/sqrt(n_features)`; output layer zero.
    pub fn init(n_features: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = 1.0 / (n_features as f64).sqrt();
        Self {
            w1: (0..hidden)
                .map(|_| (0..n_features).map(|_| rng.random_range(-a..a)).collect())
                .collect(),
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }

    fn hidden(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let pre: Vec<f64> = self
            .w1
            .iter()
            .zip(&self.b1)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect();
        let act = pre.iter().map(|a| a.max(0.0)).collect();
        (pre, act)
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let (_, h) = self.hidden(x);
        sigmoid(h.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>() + self.b2)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.w1.iter().flatten().copied().collect();
        out.extend(&self.b1);
        out.extend(&self.w2);
        out.push(self.b2);
        out
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let mut it = flat.iter().copied();
        for w in self.w1.iter_mut().flatten() {
            *w = it.next().expect("flat length matches");
        }
        for w in self.b1.iter_mut().chain(self.w2.iter_mut()) {
            *w = it.next().expect("flat length matches");
        }
        self.b2 = it.next().expect("flat length matches");
    }

    /// Mean BCE over the rows of `x` and its gradient in flat order.
    pub fn loss_and_grad(&self, x: ArrayView2<'_, f64>, y: &[u8]) -> Result<(f64, Vec<f64>)> {
        let hid = self.w2.len();
        let p = x.ncols();
        let mut grad = vec![0.0; hid * p + 2 * hid + 1];
        let mut preds = Vec::with_capacity(y.len());
        for (row, &t) in x.rows().into_iter().zip(y) {
            let xi = row.to_vec();
            let (pre, h) = self.hidden(&xi);
            let out = sigmoid(h.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>() + self.b2);
            preds.push(out);
            let dz = out - f64::from(t);
            grad[hid * p + 2 * hid] += dz;
            for k in 0..hid {
                grad[hid * p + hid + k] += dz * h[k];
                if pre[k] > 0.0 {
                    let da = dz * self.w2[k];
                    grad[hid * p + k] += da;
                    for (j, v) in xi.iter().enumerate() {
                        grad[k * p + j] += da * v;
                    }
                }
            }
        }
        let n = y.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        Ok((bce_loss(&preds, y)?, grad))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineParams {
    Lr {
        config: LrConfig,
        weights: Vec<f64>,
        bias: f64,
        iterations: usize,
    },
    Mlp {
        config: MlpConfig,
        net: MlpNet,
    },
    Rf {
        config: RfConfig,
        forest: RandomForest,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub scaler: Scaler,
    pub params: BaselineParams,
}

impl BaselineModel {
    pub fn kind(&self) -> BaselineKind {
        match self.params {
            BaselineParams::Lr { .. } => BaselineKind::Lr,
            BaselineParams::Mlp { .. } => BaselineKind::Mlp,
            BaselineParams::Rf { .. } => BaselineKind::Rf,
        }
    }
}

impl BinaryClassifier for BaselineModel {
    fn n_features(&self) -> usize {
        self.scaler.n_features()
    }

    fn scaler(&self) -> &Scaler {
        &self.scaler
    }

    fn predict_scaled(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                actual: z.len(),
            });
        }
        Ok(match &self.params {
            BaselineParams::Lr { weights, bias, .. } => {
                sigmoid(weights.iter().zip(z).map(|(w, v)| w * v).sum::<f64>() + bias)
            }
            BaselineParams::Mlp { net, .. } => net.forward(z),
            BaselineParams::Rf { forest, .. } => forest.predict_proba(z),
        })
    }
}

fn require_both(d: &LabeledDataset) -> Result<()> {
    if !d.has_both_classes() {
        return Err(Error::invalid("training data must contain both classes"));
    }
    Ok(())
}

fn scaled(kind: ScalerKind, d: &LabeledDataset) -> Result<(Scaler, Array2<f64>)> {
    let s = Scaler::fit(kind, d.values().view())?;
    let x = s.transform(d.values().view())?;
    Ok((s, x))
}

/// Full-batch gradient descent on mean log loss plus
/// `(1/C)·(‖w‖²/2)/N`.
pub fn lr_train(d: &LabeledDataset, cfg: &LrConfig) -> Result<BaselineModel> {
    require_both(d)?;
    if !(cfg.c > 0.0) {
        return Err(Error::invalid("C must be positive"));
    }
    let (scaler, x) = scaled(cfg.scaler, d)?;
    let n = x.nrows() as f64;
    let y: Vec<f64> = d.labels().iter().map(|&l| f64::from(l)).collect();
    let mut w = vec![0.0; x.ncols()];
    let mut b = 0.0;
    let mut iterations = 0;
    for _ in 0..cfg.iters {
        let mut gw: Vec<f64> = w.iter().map(|wi| wi / (cfg.c * n)).collect();
        let mut gb = 0.0;
        for (row, t) in x.axis_iter(Axis(0)).zip(&y) {
            let z = row.iter().zip(&w).map(|(v, wi)| v * wi).sum::<f64>() + b;
            let r = (sigmoid(z) - t) / n;
            gb += r;
            for (g, v) in gw.iter_mut().zip(row) {
                *g += r * v;
            }
        }
        let norm = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
        if norm < cfg.tol {
            break;
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= cfg.learning_rate * g;
        }
        b -= cfg.learning_rate * gb;
        iterations += 1;
    }
    Ok(BaselineModel {
        scaler,
        params: BaselineParams::Lr {
            config: *cfg,
            weights: w,
            bias: b,
            iterations,
        },
    })
}

/// Full-batch Adam on mean BCE.
pub fn mlp_train(d: &LabeledDataset, cfg: &MlpConfig) -> Result<BaselineModel> {
    require_both(d)?;
    if cfg.hidden == 0 {
        return Err(Error::invalid("hidden width must be at least 1"));
    }
    let (scaler, x) = scaled(cfg.scaler, d)?;
    let mut net = MlpNet::init(x.ncols(), cfg.hidden, cfg.seed);
    let mut flat = net.to_flat();
    let mut state = AdamState::new(flat.len());
    let adam = AdamConfig {
        learning_rate: cfg.learning_rate,
        ..AdamConfig::default()
    };
    for _ in 0..cfg.iters {
        let (_, g) = net.loss_and_grad(x.view(), d.labels())?;
        adam_step(&mut flat, &g, &mut state, &adam)?;
        net.set_flat(&flat);
    }
    Ok(BaselineModel {
        scaler,
        params: BaselineParams::Mlp { config: *cfg, net },
    })
}

/// Bootstrap forest with `sqrt(p)` candidate features per split. Trees
/// split on raw values, so no scaling is applied.
pub fn rf_train(d: &LabeledDataset, cfg: &RfConfig) -> Result<BaselineModel> {
    require_both(d)?;
    let params = ForestParams {
        n_trees: cfg.n_trees,
        max_depth: cfg.max_depth,
        criterion: cfg.criterion,
        max_features: MaxFeatures::Sqrt,
        ..ForestParams::default()
    };
    let forest = RandomForest::fit(d.values().view(), d.labels(), &params, cfg.seed)?;
    Ok(BaselineModel {
        scaler: Scaler::identity(d.n_features()),
        params: BaselineParams::Rf {
            config: *cfg,
            forest,
        },
    })
}

/// Class-1 probability per row of raw feature values.
pub fn baseline_predict(m: &BaselineModel, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    m.predict_proba_rows(x)
}
