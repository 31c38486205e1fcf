//! Per-feature scalers fitted on training data only.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalerKind {
    /// `(x − min) / (max − min)`, mapping training data onto `[0, 1]`.
    MinMax,
    /// `(x − mean) / sd` with the sample standard deviation.
    #[default]
    Standard,
}

/// `z = (x − offset) / scale` per column. Constant training columns get
/// scale 1 so they map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub kind: ScalerKind,
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Scaler {
    pub fn fit(kind: ScalerKind, x: ArrayView2<'_, f64>) -> Result<Self> {
        let n = x.nrows();
        if n == 0 {
            return Err(Error::invalid("cannot fit a scaler on zero rows"));
        }
        let mut offset = Vec::with_capacity(x.ncols());
        let mut scale = Vec::with_capacity(x.ncols());
        for col in x.axis_iter(Axis(1)) {
            let (o, s) = match kind {
                ScalerKind::MinMax => {
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (lo, hi - lo)
                }
                ScalerKind::Standard => {
                    let mean = col.sum() / n as f64;
                    let var = if n > 1 {
                        col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)
                    } else {
                        0.0
                    };
                    (mean, var.sqrt())
                }
            };
            offset.push(o);
            scale.push(if s > 0.0 { s } else { 1.0 });
        }
        Ok(Self {
            kind,
            offset,
            scale,
        })
    }

    /// Pass-through scaler for `n` features.
    pub fn identity(n: usize) -> Self {
        Self {
            kind: ScalerKind::Standard,
            offset: vec![0.0; n],
            scale: vec![1.0; n],
        }
    }

    pub fn n_features(&self) -> usize {
        self.offset.len()
    }

    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                actual: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.offset.iter().zip(&self.scale))
            .map(|(v, (o, s))| (v - o) / s)
            .collect())
    }

    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                actual: x.ncols(),
            });
        }
        let mut out = x.to_owned();
        for (mut col, (o, s)) in out
            .axis_iter_mut(Axis(1))
            .zip(self.offset.iter().zip(&self.scale))
        {
            col.mapv_inplace(|v| (v - o) / s);
        }
        Ok(out)
    }
}
