//! Classical simulation of quantum search algorithms.
//!
//! The pipeline: a Boolean function is encoded as a permutation oracle
//! ([`encoder`]), wrapped with superposition and interference stages into a
//! gate ([`operators`]), executed on a dense state vector with per-iteration
//! probability and entropy traces ([`engine`]), and measured and decoded.
//! Grover search additionally has a matrix-free backend ([`fastgrover`])
//! that tracks only the two distinct amplitudes and scales past 64 qubits.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.
//!
//! Basis kets are indexed MSB-first: `|x0 x1 ... x(k-1)>` is index
//! `x0 * 2^(k-1) + ... + x(k-1)`.

pub mod bits;
pub mod encoder;
pub mod engine;
pub mod error;
pub mod fastgrover;
pub mod linalg;
pub mod operators;
pub mod scalar;
pub mod state;

pub use bits::BitString;
pub use encoder::{
    code_map, injective_extension, permutation_operator, truth_table_from_marked, InjectiveTable,
    MarkedSet, Problem, TruthTable,
};
pub use engine::{
    entropy_stop, initial_state, interpret, measure, measure_many, optimal_iterations, run,
    shannon_entropy, Backend, FrequencyTable, MeasurementOutcome, TraceOptions,
};
pub use error::{Error, Result};
pub use fastgrover::{collapsed_init, collapsed_iterate, collapsed_run, collapsed_trace, Sampling};
pub use linalg::{conjugate_transpose, dot, tensor, PermutationOperator};
pub use operators::{assemble, diffusion, hadamard_word, phase_oracle, Algorithm};
pub use scalar::Scalar;

pub type Amplitude = num_complex::Complex<f64>;
pub type DenseOperator = linalg::DenseOperator<f64>;
pub type Operator = linalg::Operator<f64>;
pub type QuantumState = state::QuantumState<f64>;
pub type GateAssembly = operators::GateAssembly<f64>;
pub type SimulationTrace = engine::SimulationTrace<f64>;
pub type TraceRecord = engine::TraceRecord<f64>;
pub type CollapsedState = fastgrover::CollapsedState<f64>;
