use num_complex::Complex;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Normalized amplitude vector over the `2^qubits` computational basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumState<T: Scalar> {
    qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> QuantumState<T> {
    /// Canonical basis vector `|index>` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = crate::linalg::checked_dim(qubits)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self { qubits, amplitudes })
    }

    pub fn from_bits(bits: &BitString) -> Result<Self> {
        crate::linalg::checked_dim(bits.len())?;
        let index = bits
            .to_index()
            .expect("width already bounded by the dense cap");
        Self::basis(bits.len(), index)
    }

    /// Wraps an amplitude vector, checking the length is a power of two and
    /// the squared norm is one within [`Scalar::norm_tolerance`].
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let state = Self::from_amplitudes_unnormalized(amplitudes)?;
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::InvalidArgument(format!(
                "state is not normalized (squared norm {norm})"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_amplitudes_unnormalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self {
            qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Born-rule probabilities `|amplitude|^2` per basis index.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of the leading `register` qubits, summing out
    /// the trailing ones.
    pub fn register_probabilities(&self, register: usize) -> Vec<T> {
        assert!(register <= self.qubits);
        let tail = 1usize << (self.qubits - register);
        self.amplitudes
            .chunks(tail)
            .map(|chunk| chunk.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// Largest entrywise modulus of the difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}
