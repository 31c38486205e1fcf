//! Dense statevector simulator.
//!
//! Basis index convention: qubit 0 is the most significant bit, so for
//! `n` qubits the bit of qubit `q` in basis index `i` is
//! `(i >> (n - 1 - q)) & 1`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RotParams {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl RotParams {
    pub fn new(theta: f64, phi: f64, lambda: f64) -> Self {
        Self { theta, phi, lambda }
    }

    /// The inverse rotation: `R(θ, φ, λ)⁻¹ = R(−θ, −λ, −φ)`.
    pub fn inverse(&self) -> Self {
        Self::new(-self.theta, -self.lambda, -self.phi)
    }

    /// `Rz(λ)·Ry(θ)·Rz(φ)` as a row-major 2×2 matrix, with
    /// `Rz(a) = diag(e^{−ia/2}, e^{ia/2})` and
    /// `Ry(b) = [[cos b/2, −sin b/2], [sin b/2, cos b/2]]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let sum = 0.5 * (self.lambda + self.phi);
        let diff = 0.5 * (self.lambda - self.phi);
        [
            [
                Complex64::from_polar(c, -sum),
                Complex64::from_polar(-s, -diff),
            ],
            [
                Complex64::from_polar(s, diff),
                Complex64::from_polar(c, sum),
            ],
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
    /// Original input length when amplitude encoding zero-padded the vector.
    padded_from: Option<usize>,
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
            padded_from: None,
        }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Index { index, len: dim });
        }
        let mut s = Self::zero(n_qubits);
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Build from raw amplitudes; length must be a power of two and the
    /// state must be normalised.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "length {len} is not a power of two"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state norm² {norm} is not 1")));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
            padded_from: None,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn padded_from(&self) -> Option<usize> {
        self.padded_from
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::Index {
                index: q,
                len: self.n_qubits,
            });
        }
        Ok(())
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Apply an arbitrary 2×2 matrix to one qubit over strided amplitude pairs.
    pub fn apply_single(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) -> Result<&mut Self> {
        self.check_qubit(qubit)?;
        let stride = self.mask(qubit);
        for block in self.amplitudes.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
        Ok(self)
    }

    /// `Rz(λ)·Ry(θ)·Rz(φ)` on one qubit (`Rz(φ)` acts first).
    pub fn apply_rot(&mut self, qubit: usize, p: RotParams) -> Result<&mut Self> {
        self.apply_single(qubit, &p.matrix())
    }

    /// Controlled-Z: negate every amplitude whose basis index has both bits set.
    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<&mut Self> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::invalid("CZ needs two distinct qubits"));
        }
        let both = self.mask(q1) | self.mask(q2);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
        Ok(self)
    }

    /// One ansatz layer: a rotation on every qubit, then CZ on each
    /// adjacent pair `(0,1), (1,2), …`.
    pub fn apply_ansatz_layer(&mut self, params: &[RotParams]) -> Result<&mut Self> {
        if params.len() != self.n_qubits {
            return Err(Error::Shape {
                expected: self.n_qubits,
                actual: params.len(),
            });
        }
        for (q, p) in params.iter().enumerate() {
            self.apply_rot(q, *p)?;
        }
        for q in 1..self.n_qubits {
            self.apply_cz(q - 1, q)?;
        }
        Ok(self)
    }

    /// `⟨Z⟩` on one qubit: `Σ ±|aᵢ|²`, `+` where the qubit bit is 0.
    pub fn expval_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & mask == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }

    /// `⟨Z_q⟩` for every qubit in one pass.
    pub fn expvals_z(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let mut out = vec![0.0; n];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (q, e) in out.iter_mut().enumerate() {
                if (i >> (n - 1 - q)) & 1 == 0 {
                    *e += p;
                } else {
                    *e -= p;
                }
            }
        }
        out
    }

    /// Debug dump: one `index\tre\tim` row per amplitude.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index\tre\tim")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(w, "{i}\t{}\t{}", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Amplitude encoding: `x / ‖x‖`, zero-padded to the next power of two.
pub fn amplitude_encode(x: &[f64]) -> Result<Statevector> {
    if x.is_empty() {
        return Err(Error::invalid("cannot encode an empty vector"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("cannot encode non-finite values"));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::invalid("cannot encode the zero vector"));
    }
    let dim = x.len().next_power_of_two();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for (a, v) in amplitudes.iter_mut().zip(x) {
        *a = Complex64::new(v / norm, 0.0);
    }
    Ok(Statevector {
        n_qubits: dim.trailing_zeros() as usize,
        amplitudes,
        padded_from: (dim != x.len()).then_some(x.len()),
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn encode_basis_and_normalise() {
        let s = amplitude_encode(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s, Statevector::zero(2));
        let s = amplitude_encode(&[3.0, 4.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.6), c(0.8), c(0.0), c(0.0)]);
    }

    #[test]
    fn encode_pads_and_errors() {
        let s = amplitude_encode(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert_eq!(s.padded_from(), Some(3));
        assert_eq!(s.amplitudes()[3], c(0.0));
        assert!(amplitude_encode(&[]).is_err());
        assert!(amplitude_encode(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_rotation_is_identity() {
        let mut s = amplitude_encode(&[0.3, -0.1, 0.7, 0.2]).unwrap();
        let before = s.clone();
        s.apply_rot(1, RotParams::default()).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn ry_pi_flips_zero_to_one() {
        let mut s = Statevector::zero(1);
        s.apply_rot(0, RotParams::new(PI, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cz_phases() {
        let mut s = Statevector::zero(2);
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s, Statevector::zero(2));
        let mut s = Statevector::basis(2, 3).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s.amplitudes()[3], c(-1.0));
        assert!(s.apply_cz(1, 1).is_err());
        assert!(s.apply_cz(0, 2).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = Statevector::basis(3, 0b100).unwrap();
        assert_eq!(s.expval_z(0).unwrap(), -1.0);
        assert_eq!(s.expval_z(1).unwrap(), 1.0);
        assert_eq!(s.expvals_z(), vec![-1.0, 1.0, 1.0]);
    }

    #[test]
    fn expval_of_plus_state_is_zero() {
        let s = amplitude_encode(&[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(s.expval_z(0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(s.expval_z(1).is_err());
    }

    #[test]
    fn layer_checks_param_count() {
        let mut s = Statevector::zero(3);
        assert!(s.apply_ansatz_layer(&[RotParams::default(); 2]).is_err());
        s.apply_ansatz_layer(&[RotParams::default(); 3]).unwrap();
        assert_eq!(s, Statevector::zero(3));
    }
}
