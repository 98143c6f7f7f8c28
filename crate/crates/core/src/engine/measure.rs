//! Seeded projective measurement in the computational basis and the split
//! of a measured ket into answer register and ancilla.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitString;
use crate::scalar::Scalar;
use crate::state::QuantumState;

/// Generator behind every seeded measurement; recorded in trace metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MeasurementOutcome {
    pub raw_bits: BitString,
    pub answer_bits: BitString,
    pub ancilla_bit: bool,
}

impl MeasurementOutcome {
    /// Splits an `(n + 1)`-bit ket into its first `n` bits and the last one.
    pub fn from_raw(raw_bits: BitString) -> Self {
        assert!(
            raw_bits.len() >= 2,
            "need at least one register bit and an ancilla"
        );
        let (answer_bits, ancilla) = raw_bits.split_at(raw_bits.len() - 1);
        Self {
            ancilla_bit: ancilla.bit(0),
            answer_bits,
            raw_bits,
        }
    }
}

/// The searched argument: the measured ket with the ancilla stripped.
pub fn interpret(outcome: &MeasurementOutcome) -> BitString {
    outcome.answer_bits.clone()
}

/// Inverse-CDF sampler over a state's Born distribution.
pub struct Sampler {
    qubits: usize,
    cumulative: Vec<f64>,
}

impl Sampler {
    pub fn new<T: Scalar>(state: &QuantumState<T>) -> Self {
        let mut acc = 0.0f64;
        let cumulative = state
            .probabilities()
            .into_iter()
            .map(|p| {
                acc += p.to_f64().unwrap_or(0.0);
                acc
            })
            .collect();
        Self {
            qubits: state.qubits(),
            cumulative,
        }
    }

    pub fn sample_index(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty state");
        let u = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        // guard against u landing on the last boundary through roundoff
        i.min(self.cumulative.len() - 1)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> MeasurementOutcome {
        MeasurementOutcome::from_raw(BitString::from_index(self.sample_index(rng), self.qubits))
    }
}

/// One measurement, deterministic in `seed`.
pub fn measure<T: Scalar>(state: &QuantumState<T>, seed: u64) -> MeasurementOutcome {
    Sampler::new(state).sample(&mut rng_from_seed(seed))
}

/// `shots` measurements drawn from a single seeded stream.
pub fn measure_many<T: Scalar>(
    state: &QuantumState<T>,
    shots: usize,
    seed: u64,
) -> Vec<MeasurementOutcome> {
    let sampler = Sampler::new(state);
    let mut rng = rng_from_seed(seed);
    (0..shots).map(|_| sampler.sample(&mut rng)).collect()
}

/// Per-answer and per-ancilla counts over a batch of outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FrequencyTable {
    pub shots: usize,
    pub answers: BTreeMap<BitString, usize>,
    pub ancilla: [usize; 2],
}

impl FrequencyTable {
    pub fn from_outcomes<'a>(outcomes: impl IntoIterator<Item = &'a MeasurementOutcome>) -> Self {
        let mut table = Self::default();
        for o in outcomes {
            table.push(o);
        }
        table
    }

    pub fn push(&mut self, o: &MeasurementOutcome) {
        self.shots += 1;
        *self.answers.entry(interpret(o)).or_default() += 1;
        self.ancilla[o.ancilla_bit as usize] += 1;
    }

    pub fn frequency(&self, answer: &BitString) -> f64 {
        self.answers.get(answer).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    pub fn ancilla_frequency(&self, bit: bool) -> f64 {
        self.ancilla[bit as usize] as f64 / self.shots as f64
    }
}
