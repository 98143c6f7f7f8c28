use num_complex::Complex;
use serde::Serialize;

use crate::operators::Algorithm;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Collapsed,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Dense => "dense",
            Backend::Collapsed => "collapsed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceMetadata {
    pub backend: Backend,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    /// Exact decimal count of marked inputs.
    pub marked_count: String,
    /// Identifier of the generator used for any sampling attached to the run.
    pub rng: Option<String>,
    /// Iterations after which the collapsed state was renormalized.
    pub renormalized_at: Vec<u64>,
}

/// One row of a trace: the state after `iteration` oracle/interference
/// rounds (0 is the state right after superposition).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord<T: Scalar> {
    pub iteration: u64,
    pub p_marked: T,
    /// Entropy of the computational-register marginal, in bits.
    pub entropy_bits: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Complex<T>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationTrace<T: Scalar> {
    pub metadata: TraceMetadata,
    pub records: Vec<TraceRecord<T>>,
}

impl<T: Scalar> SimulationTrace<T> {
    pub fn last(&self) -> &TraceRecord<T> {
        self.records
            .last()
            .expect("traces always hold the superposition record")
    }

    pub fn entropies(&self) -> Vec<T> {
        self.records.iter().map(|r| r.entropy_bits).collect()
    }

    pub fn p_marked(&self) -> Vec<T> {
        self.records.iter().map(|r| r.p_marked).collect()
    }

    pub fn record_at(&self, iteration: u64) -> Option<&TraceRecord<T>> {
        self.records.iter().find(|r| r.iteration == iteration)
    }
}

/// What to record besides the scalar columns. Wide columns are only kept
/// when the state has at most `max_wide_qubits` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceOptions {
    pub per_basis: bool,
    pub amplitudes: bool,
    pub max_wide_qubits: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            per_basis: false,
            amplitudes: false,
            max_wide_qubits: 12,
        }
    }
}

impl TraceOptions {
    pub fn scalars_only() -> Self {
        Self::default()
    }

    pub fn wide() -> Self {
        Self {
            per_basis: true,
            amplitudes: true,
            ..Self::default()
        }
    }
}
