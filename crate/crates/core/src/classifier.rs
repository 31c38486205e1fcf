//! Shared prediction interface for the hybrid model and the baselines.

use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scaling::Scaler;

pub trait BinaryClassifier: Sync {
    fn n_features(&self) -> usize;

    /// Scaler fitted on the training split; inputs are raw feature values.
    fn scaler(&self) -> &Scaler;

    /// Class-1 probability for an already scaled input.
    fn predict_scaled(&self, z: &[f64]) -> Result<f64>;

    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                actual: x.len(),
            });
        }
        self.predict_scaled(&self.scaler().transform_row(x)?)
    }

    fn predict_proba_rows(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                actual: x.ncols(),
            });
        }
        let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
        rows.par_iter().map(|r| self.predict_proba(r)).collect()
    }

    /// Label 1 iff the probability is at least `threshold`.
    fn predict_labels(&self, x: ArrayView2<'_, f64>, threshold: f64) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba_rows(x)?
            .into_iter()
            .map(|p| u8::from(p >= threshold))
            .collect())
    }
}
