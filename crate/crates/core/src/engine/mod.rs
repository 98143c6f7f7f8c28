//! Dense execution of a [`GateAssembly`]: start in `|0...0>|1>`, apply the
//! superposition stage once, then repeat oracle and interference while
//! tracing marked probability and register entropy.

mod entropy;
mod measure;
mod trace;

pub use entropy::{entropy_stop, shannon_entropy, EntropyStopper};
pub use measure::{
    interpret, measure, measure_many, rng_from_seed, FrequencyTable, MeasurementOutcome, Sampler,
    RNG_ALGORITHM,
};
pub use trace::{Backend, SimulationTrace, TraceMetadata, TraceOptions, TraceRecord};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::operators::GateAssembly;
use crate::scalar::Scalar;
use crate::state::QuantumState;

/// `|0...0>` on `n` register qubits followed by `|1>` on each of `m` ancillas.
pub fn initial_state<T: Scalar>(n: usize, m: usize) -> Result<QuantumState<T>> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("n and m must be positive".into()));
    }
    QuantumState::basis(n + m, (1 << m) - 1)
}

/// `M / 2^n` as a double, reduced exactly before conversion so it stays
/// meaningful when `2^n` is not representable.
pub(crate) fn ratio_pow2(numerator: &BigUint, n: usize) -> f64 {
    let bits = numerator.bits() as usize;
    let (mantissa, shift) = if bits > 63 {
        (
            (numerator >> (bits - 63)).to_u64().expect("63 bits fit"),
            bits - 63,
        )
    } else {
        (numerator.to_u64().expect("fits in u64"), 0)
    };
    // split the scaling so intermediate powers never overflow or underflow early
    let exp = shift as i64 - n as i64;
    let half = (exp / 2) as i32;
    mantissa as f64 * 2f64.powi(half) * 2f64.powi(exp as i32 - half)
}

/// Amplification angle `θ = arcsin(sqrt(M / 2^n))`.
pub fn amplification_angle(n: usize, marked: &BigUint) -> Result<f64> {
    check_marked(n, marked)?;
    Ok(ratio_pow2(marked, n).sqrt().asin())
}

pub(crate) fn check_marked(n: usize, marked: &BigUint) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if *marked == BigUint::ZERO || marked.bits() > n as u64 {
        return Err(Error::InvalidMarkedSet(format!(
            "marked count {marked} must satisfy 1 <= M < 2^{n}"
        )));
    }
    Ok(())
}

/// Iteration count maximizing `sin^2((2k + 1)θ)` over the first
/// amplification period `1 <= k < 1 + π/(2θ)`, ties going to the smaller `k`.
///
/// Compares distances of `(2k + 1)θ` to the nearest odd multiple of `π/2`
/// rather than `sin^2` values, which stay distinguishable when `θ` is tiny.
pub fn optimal_iterations(n: usize, marked: impl Into<BigUint>) -> Result<u64> {
    let theta = amplification_angle(n, &marked.into())?;
    optimal_iterations_for_angle(theta).ok_or(Error::IterationOverflow(n))
}

pub(crate) fn optimal_iterations_for_angle(theta: f64) -> Option<u64> {
    use std::f64::consts::{FRAC_PI_2, PI};
    const TIE: f64 = 1e-13;
    let period = FRAC_PI_2 / theta;
    let end = 1.0 + period;
    if !end.is_finite() || end + 1.0 >= u64::MAX as f64 {
        return None;
    }
    // largest integer strictly below 1 + period
    let last = (end.ceil() - 1.0).max(1.0);
    let mut peak = FRAC_PI_2 / (2.0 * theta) - 0.5;
    while peak < 1.0 {
        peak += period;
    }
    let distance = |k: u64| {
        let phase = (2.0 * k as f64 + 1.0) * theta;
        let r = (phase - FRAC_PI_2).rem_euclid(PI);
        r.min(PI - r)
    };
    let mut candidates: Vec<u64> = [1.0, last, peak.floor(), peak.ceil()]
        .into_iter()
        .filter(|&k| k >= 1.0 && k <= last)
        .map(|k| k as u64)
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let mut best = candidates[0];
    let mut best_d = distance(best);
    for &k in &candidates[1..] {
        let d = distance(k);
        if d < best_d - TIE {
            best = k;
            best_d = d;
        }
    }
    Some(best)
}

/// Closed-form marked probability after `k` rounds.
pub fn closed_form_probability(theta: f64, k: u64) -> f64 {
    ((2.0 * k as f64 + 1.0) * theta).sin().powi(2)
}

/// Step-by-step dense execution.
pub struct DenseRun<'a, T: Scalar> {
    assembly: &'a GateAssembly<T>,
    options: TraceOptions,
    state: QuantumState<T>,
    iteration: u64,
    records: Vec<TraceRecord<T>>,
}

impl<'a, T: Scalar> DenseRun<'a, T> {
    /// Prepares the initial state and applies the superposition stage.
    pub fn start(assembly: &'a GateAssembly<T>, options: TraceOptions) -> Result<Self> {
        let initial = initial_state(assembly.n, assembly.m)?;
        let state = assembly.superposition.apply(&initial)?;
        let mut run = Self {
            assembly,
            options,
            state,
            iteration: 0,
            records: Vec::new(),
        };
        run.record();
        Ok(run)
    }

    /// One oracle + interference round.
    pub fn step(&mut self) -> Result<&TraceRecord<T>> {
        let after_oracle = self.assembly.entanglement.apply(&self.state)?;
        self.state = self.assembly.interference.apply(&after_oracle)?;
        self.iteration += 1;
        self.record();
        Ok(self.records.last().expect("just recorded"))
    }

    pub fn state(&self) -> &QuantumState<T> {
        &self.state
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn records(&self) -> &[TraceRecord<T>] {
        &self.records
    }

    fn record(&mut self) {
        let register = self.state.register_probabilities(self.assembly.n);
        let p_marked = self.assembly.marked.iter().map(|&x| register[x]).sum();
        let wide = self.state.qubits() <= self.options.max_wide_qubits;
        self.records.push(TraceRecord {
            iteration: self.iteration,
            p_marked,
            entropy_bits: shannon_entropy(&register),
            probabilities: (wide && self.options.per_basis).then(|| self.state.probabilities()),
            amplitudes: (wide && self.options.amplitudes).then(|| self.state.amplitudes().to_vec()),
        });
    }

    pub fn finish(self) -> (QuantumState<T>, SimulationTrace<T>) {
        let metadata = TraceMetadata {
            backend: Backend::Dense,
            algorithm: self.assembly.algorithm,
            n: self.assembly.n,
            m: self.assembly.m,
            marked_count: self.assembly.marked.len().to_string(),
            rng: None,
            renormalized_at: Vec::new(),
        };
        (
            self.state,
            SimulationTrace {
                metadata,
                records: self.records,
            },
        )
    }
}

/// Runs `iterations` rounds and returns the final state with its trace.
pub fn run<T: Scalar>(
    assembly: &GateAssembly<T>,
    iterations: u64,
    options: TraceOptions,
) -> Result<(QuantumState<T>, SimulationTrace<T>)> {
    if iterations == 0 {
        return Err(Error::InvalidArgument(
            "iterations must be at least 1".into(),
        ));
    }
    let mut dense = DenseRun::start(assembly, options)?;
    for _ in 0..iterations {
        dense.step()?;
    }
    Ok(dense.finish())
}

/// Runs until the register entropy reaches a local minimum, then returns
/// the state at that minimum. Fails if `max_iterations` pass first.
pub fn run_until_entropy_stop<T: Scalar>(
    assembly: &GateAssembly<T>,
    window: usize,
    max_iterations: u64,
    options: TraceOptions,
) -> Result<(QuantumState<T>, SimulationTrace<T>, u64)> {
    let mut dense = DenseRun::start(assembly, options)?;
    let mut stopper = EntropyStopper::new(window);
    stopper.push(dense.records()[0].entropy_bits);
    let mut states = vec![dense.state().clone()];
    while dense.iteration() < max_iterations + window as u64 {
        let e = dense.step()?.entropy_bits;
        states.push(dense.state().clone());
        if let Some(k) = stopper.push(e) {
            let (_, mut trace) = dense.finish();
            trace.records.truncate(k + 1);
            return Ok((states.swap_remove(k), trace, k as u64));
        }
    }
    Err(Error::InvalidArgument(format!(
        "entropy did not reach a local minimum within {max_iterations} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{
        injective_extension, permutation_operator, truth_table_from_marked, MarkedSet,
    };
    use crate::operators::{assemble, Algorithm};

    fn grover(n: usize, items: &[&str]) -> GateAssembly<f64> {
        let marked = MarkedSet::parse(n, items.iter().copied()).unwrap();
        let uf = permutation_operator(&injective_extension(
            &truth_table_from_marked(&marked).unwrap(),
        ))
        .unwrap();
        assemble(Algorithm::Grover, n, uf).unwrap()
    }

    // independent oracle: argmax of sin^2 over the window 1 <= k < 1 + π/(2θ),
    // scanning every k
    fn brute_force_optimal(n: usize, m: u64) -> u64 {
        let theta = ((m as f64) / (1u64 << n) as f64).sqrt().asin();
        let end = 1.0 + std::f64::consts::PI / (2.0 * theta);
        let last = ((end.ceil() - 1.0) as u64).max(1);
        let mut best = (1, f64::MIN);
        for k in 1..=last {
            let p = ((2 * k + 1) as f64 * theta).sin().powi(2);
            if p > best.1 + 1e-12 {
                best = (k, p);
            }
        }
        best.0
    }

    #[test]
    fn initial_state_sets_ancilla() {
        let s = initial_state::<f64>(2, 1).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.amplitude(1).re, 1.0);
        assert_eq!(s.norm_sqr(), 1.0);
        let s = initial_state::<f64>(3, 1).unwrap();
        assert_eq!(s.amplitude(0b0001).re, 1.0);
    }

    #[test]
    fn optimal_iteration_examples() {
        assert_eq!(optimal_iterations(2, 1u32).unwrap(), 1);
        assert_eq!(optimal_iterations(3, 1u32).unwrap(), 2);
        assert_eq!(optimal_iterations(3, 2u32).unwrap(), 1);
        assert!(optimal_iterations(3, 0u32).is_err());
        assert!(optimal_iterations(3, 8u32).is_err());
    }

    #[test]
    fn optimal_iterations_match_brute_force_scan() {
        for n in 1..=12usize {
            for m in 1..(1u64 << n).min(40) {
                assert_eq!(
                    optimal_iterations(n, m).unwrap(),
                    brute_force_optimal(n, m),
                    "n = {n}, M = {m}"
                );
            }
        }
    }

    #[test]
    fn ratio_handles_wide_denominators() {
        assert_eq!(ratio_pow2(&BigUint::from(1u32), 64), 2f64.powi(-64));
        assert_eq!(ratio_pow2(&BigUint::from(3u32), 2), 0.75);
        let big = (BigUint::from(1u32) << 1024usize) - 1u32;
        assert!((ratio_pow2(&big, 1024) - 1.0).abs() < 1e-15);
        assert_eq!(ratio_pow2(&BigUint::from(1u32), 1024), 2f64.powi(-1024));
    }

    #[test]
    fn two_qubit_search_is_exact() {
        let g = grover(2, &["01"]);
        let (_, trace) = run(&g, 1, TraceOptions::default()).unwrap();
        assert_eq!(trace.records.len(), 2);
        assert!((trace.last().p_marked - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_qubit_two_rounds() {
        let g = grover(3, &["011"]);
        let (state, trace) = run(&g, 2, TraceOptions::default()).unwrap();
        assert!((trace.last().p_marked - 0.9453125).abs() < 1e-10);
        assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn superposition_record_is_uniform() {
        let g = grover(4, &["1010"]);
        let (_, trace) = run(&g, 1, TraceOptions::wide()).unwrap();
        let first = &trace.records[0];
        assert_eq!(first.iteration, 0);
        assert!((first.entropy_bits - 4.0).abs() < 1e-12);
        assert!((first.p_marked - 1.0 / 16.0).abs() < 1e-12);
        let probs = first.probabilities.as_ref().unwrap();
        assert_eq!(probs.len(), 32);
        assert!(probs.iter().all(|p| (p - 1.0 / 32.0).abs() < 1e-12));
    }

    #[test]
    fn wide_columns_are_size_gated() {
        let g = grover(3, &["011"]);
        let opts = TraceOptions {
            max_wide_qubits: 3,
            ..TraceOptions::wide()
        };
        let (_, trace) = run(&g, 1, opts).unwrap();
        assert!(trace
            .records
            .iter()
            .all(|r| r.probabilities.is_none() && r.amplitudes.is_none()));
    }

    #[test]
    fn zero_iterations_rejected() {
        assert!(run(&grover(2, &["01"]), 0, TraceOptions::default()).is_err());
    }

    #[test]
    fn entropy_stop_examples() {
        let (_, trace) = run(&grover(3, &["011"]), 6, TraceOptions::default()).unwrap();
        assert_eq!(entropy_stop(&trace.entropies(), 1), Some(2));
        let (_, trace) = run(&grover(2, &["10"]), 3, TraceOptions::default()).unwrap();
        assert_eq!(entropy_stop(&trace.entropies(), 1), Some(1));
    }

    #[test]
    fn run_until_stop_returns_state_at_minimum() {
        let g = grover(3, &["011"]);
        let (state, trace, k) =
            run_until_entropy_stop(&g, 1, 100, TraceOptions::default()).unwrap();
        assert_eq!(k, 2);
        assert_eq!(trace.records.len(), 3);
        let (expected, _) = run(&g, 2, TraceOptions::default()).unwrap();
        assert_eq!(state, expected);
    }

    #[test]
    fn overshoot_lowers_probability() {
        let (_, trace) = run(&grover(3, &["011"]), 4, TraceOptions::default()).unwrap();
        let p = trace.p_marked();
        assert!(p[3] < p[2] && p[4] < p[3]);
    }
}
