//! Matrix-free Grover backend.
//!
//! Starting from the uniform superposition, every marked basis state shares
//! one amplitude `a` and every unmarked state shares another `b`, so the
//! whole register is described by two reals and the marked count `M`. One
//! iteration costs O(1) regardless of `n`.
//!
//! Amplitudes are held scaled by `sqrt(2^n)` so that both stay of order one
//! even when `2^n` is far outside double range; [`CollapsedState::a`] and
//! [`CollapsedState::b`] undo the scaling.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::bits::BitString;
use crate::encoder::MarkedSet;
use crate::engine::{
    self, rng_from_seed, Backend, MeasurementOutcome, SimulationTrace, TraceMetadata, TraceRecord,
};
use crate::error::{Error, Result};
use crate::operators::Algorithm;
use crate::scalar::Scalar;

/// Normalization drift beyond which the state is rescaled.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-8;

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 63 {
        (x.to_u64().expect("fits") as f64).log2()
    } else {
        let shift = bits - 63;
        ((x >> shift).to_u64().expect("63 bits fit") as f64).log2() + shift as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapsedState<T: Scalar> {
    n: usize,
    marked: BigUint,
    iteration: u64,
    /// `a * sqrt(2^n)`
    a_scaled: T,
    /// `b * sqrt(2^n)`
    b_scaled: T,
    /// `M / 2^n`
    p: T,
    /// `(2^n - M) / 2^n`
    q: T,
    theta: f64,
}

/// Uniform superposition: `a = b = 2^(-n/2)`.
pub fn collapsed_init<T: Scalar>(
    n: usize,
    marked: impl Into<BigUint>,
) -> Result<CollapsedState<T>> {
    let marked = marked.into();
    engine::check_marked(n, &marked)?;
    let unmarked = (BigUint::from(1u32) << n) - &marked;
    let p = engine::ratio_pow2(&marked, n);
    let q = engine::ratio_pow2(&unmarked, n);
    Ok(CollapsedState {
        n,
        theta: p.sqrt().asin(),
        marked,
        iteration: 0,
        a_scaled: T::one(),
        b_scaled: T::one(),
        p: T::from_f64_lossy(p),
        q: T::from_f64_lossy(q),
    })
}

/// Oracle `a -> -a`, then inversion about the mean
/// `<α> = (-M a + (2^n - M) b) / 2^n`: `a' = 2<α> + a`, `b' = 2<α> - b`.
pub fn collapsed_iterate<T: Scalar>(s: &CollapsedState<T>) -> CollapsedState<T> {
    let mean = s.q * s.b_scaled - s.p * s.a_scaled;
    let two_mean = T::two() * mean;
    CollapsedState {
        a_scaled: two_mean + s.a_scaled,
        b_scaled: two_mean - s.b_scaled,
        iteration: s.iteration + 1,
        ..s.clone()
    }
}

impl<T: Scalar> CollapsedState<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marked_count(&self) -> &BigUint {
        &self.marked
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn unscale(&self) -> T {
        T::from_f64_lossy(2f64.powf(-(self.n as f64) / 2.0))
    }

    /// Amplitude of each marked basis state (underflows for very large `n`).
    pub fn a(&self) -> T {
        self.a_scaled * self.unscale()
    }

    /// Amplitude of each unmarked basis state.
    pub fn b(&self) -> T {
        self.b_scaled * self.unscale()
    }

    /// `M a^2`
    pub fn p_marked(&self) -> T {
        self.p * self.a_scaled * self.a_scaled
    }

    /// `(2^n - M) b^2`
    pub fn p_unmarked(&self) -> T {
        self.q * self.b_scaled * self.b_scaled
    }

    /// `M a^2 + (2^n - M) b^2`
    pub fn norm_sqr(&self) -> T {
        self.p_marked() + self.p_unmarked()
    }

    /// Register entropy of the two-level distribution: `M` states at `a^2`
    /// and `2^n - M` at `b^2`.
    pub fn entropy_bits(&self) -> T {
        let pm = self.p_marked().to_f64().unwrap_or(f64::NAN);
        let pu = self.p_unmarked().to_f64().unwrap_or(f64::NAN);
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let log2_m = log2_big(&self.marked);
        let log2_u = self.n as f64 + (-p).ln_1p() / std::f64::consts::LN_2;
        let term = |mass: f64, log2_count: f64| {
            if mass > 0.0 {
                -mass * mass.log2() + mass * log2_count
            } else {
                0.0
            }
        };
        T::from_f64_lossy((term(pm, log2_m) + term(pu, log2_u)).max(0.0))
    }

    /// Closed-form state after `k` iterations:
    /// `a = sin((2k+1)θ)/sqrt(M)`, `b = cos((2k+1)θ)/sqrt(2^n - M)`.
    pub fn jump_to(&self, k: u64) -> Self {
        let phase = (2.0 * k as f64 + 1.0) * self.theta;
        let sp = self.p.to_f64().unwrap_or(f64::NAN).sqrt();
        let sq = self.q.to_f64().unwrap_or(f64::NAN).sqrt();
        Self {
            iteration: k,
            a_scaled: T::from_f64_lossy(phase.sin() / sp),
            b_scaled: T::from_f64_lossy(phase.cos() / sq),
            ..self.clone()
        }
    }

    /// Rescales to unit norm if drift exceeds [`RENORMALIZE_THRESHOLD`].
    /// Returns whether a rescale happened.
    pub fn renormalize_if_drifted(&mut self) -> bool {
        let norm = self.norm_sqr();
        if (norm - T::one()).abs().to_f64().unwrap_or(f64::INFINITY) <= RENORMALIZE_THRESHOLD {
            return false;
        }
        let scale = norm.sqrt().recip();
        self.a_scaled = self.a_scaled * scale;
        self.b_scaled = self.b_scaled * scale;
        true
    }

    fn record(&self) -> TraceRecord<T> {
        TraceRecord {
            iteration: self.iteration,
            p_marked: self.p_marked(),
            entropy_bits: self.entropy_bits(),
            probabilities: None,
            amplitudes: None,
        }
    }

    /// Draws one `(n + 1)`-bit outcome: a marked string with probability
    /// `M a^2`, uniform within each class, and a fair ancilla bit.
    pub fn sample(&self, marked: &MarkedSet, rng: &mut impl Rng) -> MeasurementOutcome {
        assert_eq!(marked.n(), self.n, "marked set width differs from state");
        let pm = self.p_marked().to_f64().unwrap_or(0.0);
        let answer = if rng.gen::<f64>() < pm {
            let i = rng.gen_range(0..marked.len());
            marked.iter().nth(i).expect("index in range").clone()
        } else {
            sample_unmarked(self.n, marked, rng)
        };
        let ancilla = rng.gen::<bool>();
        MeasurementOutcome::from_raw(answer.concat(&BitString::new(vec![ancilla])))
    }
}

fn sample_unmarked(n: usize, marked: &MarkedSet, rng: &mut impl Rng) -> BitString {
    if n <= 16 {
        let taken: BTreeSet<usize> = marked.indices().expect("small n").into_iter().collect();
        let free = (1usize << n) - taken.len();
        let mut pick = rng.gen_range(0..free);
        for i in 0..1usize << n {
            if taken.contains(&i) {
                continue;
            }
            if pick == 0 {
                return BitString::from_index(i, n);
            }
            pick -= 1;
        }
        unreachable!("pick < number of unmarked strings");
    }
    // fewer than half the strings are marked when n > 16 for any listable set
    loop {
        let candidate = BitString::new((0..n).map(|_| rng.gen::<bool>()).collect());
        if !marked.contains(&candidate) {
            return candidate;
        }
    }
}

fn metadata(n: usize, marked: &BigUint) -> TraceMetadata {
    TraceMetadata {
        backend: Backend::Collapsed,
        algorithm: Algorithm::Grover,
        n,
        m: 1,
        marked_count: marked.to_string(),
        rng: None,
        renormalized_at: Vec::new(),
    }
}

/// Iterates the recurrence `iterations` times, recording every step.
pub fn collapsed_trace<T: Scalar>(
    n: usize,
    marked: impl Into<BigUint>,
    iterations: u64,
) -> Result<SimulationTrace<T>> {
    collapsed_run(n, marked, iterations).map(|(_, trace)| trace)
}

/// [`collapsed_trace`] that also hands back the final state.
pub fn collapsed_run<T: Scalar>(
    n: usize,
    marked: impl Into<BigUint>,
    iterations: u64,
) -> Result<(CollapsedState<T>, SimulationTrace<T>)> {
    if iterations == 0 {
        return Err(Error::InvalidArgument(
            "iterations must be at least 1".into(),
        ));
    }
    let marked = marked.into();
    let mut state = collapsed_init::<T>(n, marked.clone())?;
    let mut trace = SimulationTrace {
        metadata: metadata(n, &marked),
        records: vec![state.record()],
    };
    for _ in 0..iterations {
        step(&mut state, &mut trace);
    }
    Ok((state, trace))
}

fn step<T: Scalar>(state: &mut CollapsedState<T>, trace: &mut SimulationTrace<T>) {
    *state = collapsed_iterate(state);
    if state.renormalize_if_drifted() {
        trace.metadata.renormalized_at.push(state.iteration);
    }
    trace.records.push(state.record());
}

/// Iterates until the register entropy reaches a local minimum and returns
/// the state at the minimum, its trace, and the stop iteration.
pub fn collapsed_run_until_entropy_stop<T: Scalar>(
    n: usize,
    marked: impl Into<BigUint>,
    window: usize,
    max_iterations: u64,
) -> Result<(CollapsedState<T>, SimulationTrace<T>, u64)> {
    let marked = marked.into();
    let mut state = collapsed_init::<T>(n, marked.clone())?;
    let mut trace = SimulationTrace {
        metadata: metadata(n, &marked),
        records: vec![state.record()],
    };
    let mut stopper = engine::EntropyStopper::new(window);
    stopper.push(trace.records[0].entropy_bits);
    while state.iteration < max_iterations + window as u64 {
        step(&mut state, &mut trace);
        if let Some(k) = stopper.push(trace.last().entropy_bits) {
            trace.records.truncate(k + 1);
            // replay to k so renormalization events match the returned state
            let (at_k, replay) = collapsed_run::<T>(n, marked, k as u64)?;
            trace.metadata.renormalized_at = replay.metadata.renormalized_at;
            return Ok((at_k, trace, k as u64));
        }
    }
    Err(Error::InvalidArgument(format!(
        "entropy did not reach a local minimum within {max_iterations} iterations"
    )))
}

/// Which iterations a long collapsed trace records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Every,
    /// `0, 1, 2, 4, 8, ...` and the final iteration.
    Log2,
}

/// Like [`collapsed_trace`] but evaluates the closed form at the sampled
/// iterations only, so cost is logarithmic in `iterations`.
pub fn collapsed_trace_sampled<T: Scalar>(
    n: usize,
    marked: impl Into<BigUint>,
    iterations: u64,
    sampling: Sampling,
) -> Result<SimulationTrace<T>> {
    if iterations == 0 {
        return Err(Error::InvalidArgument(
            "iterations must be at least 1".into(),
        ));
    }
    let marked = marked.into();
    let init = collapsed_init::<T>(n, marked.clone())?;
    let points: Vec<u64> = match sampling {
        Sampling::Every => (0..=iterations).collect(),
        Sampling::Log2 => {
            let mut v = vec![0];
            let mut k = 1u64;
            while k < iterations {
                v.push(k);
                k = k.saturating_mul(2);
            }
            v.push(iterations);
            v
        }
    };
    Ok(SimulationTrace {
        metadata: metadata(n, &marked),
        records: points
            .into_iter()
            .map(|k| init.jump_to(k).record())
            .collect(),
    })
}

/// Outcome of running the collapsed backend straight to its optimum.
#[derive(Clone, Debug)]
pub struct Jump<T: Scalar> {
    pub iterations: u64,
    pub state: CollapsedState<T>,
}

/// Jumps to the optimal iteration count via the closed form.
pub fn jump_to_optimal<T: Scalar>(n: usize, marked: impl Into<BigUint>) -> Result<Jump<T>> {
    let init = collapsed_init::<T>(n, marked)?;
    let k = engine::optimal_iterations_for_angle(init.theta).ok_or(Error::IterationOverflow(n))?;
    Ok(Jump {
        iterations: k,
        state: init.jump_to(k),
    })
}

/// Seeded batch of collapsed-state samples.
pub fn sample_collapsed<T: Scalar>(
    state: &CollapsedState<T>,
    marked: &MarkedSet,
    shots: usize,
    seed: u64,
) -> Vec<MeasurementOutcome> {
    let mut rng = rng_from_seed(seed);
    (0..shots).map(|_| state.sample(marked, &mut rng)).collect()
}

/// Largest absolute differences in `p_marked` and entropy between two
/// traces, matched by iteration. Errors if the iteration sets differ.
pub fn max_deviation<T: Scalar>(a: &SimulationTrace<T>, b: &SimulationTrace<T>) -> Result<(T, T)> {
    if a.records.len() != b.records.len() {
        return Err(Error::DimensionMismatch {
            left: a.records.len(),
            right: b.records.len(),
        });
    }
    let mut dp = T::zero();
    let mut de = T::zero();
    for (x, y) in a.records.iter().zip(&b.records) {
        if x.iteration != y.iteration {
            return Err(Error::InvalidArgument(format!(
                "iteration {} paired with {}",
                x.iteration, y.iteration
            )));
        }
        dp = dp.max((x.p_marked - y.p_marked).abs());
        de = de.max((x.entropy_bits - y.entropy_bits).abs());
    }
    Ok((dp, de))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_uniform() {
        let s = collapsed_init::<f64>(2, 1u32).unwrap();
        assert_eq!((s.a(), s.b()), (0.5, 0.5));
        assert_eq!(s.norm_sqr(), 1.0);
        let s = collapsed_init::<f64>(64, 1u32).unwrap();
        assert_eq!(s.a(), 2f64.powi(-32));
        assert_eq!(s.b(), 2f64.powi(-32));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((s.entropy_bits() - 64.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_marked_counts() {
        assert!(collapsed_init::<f64>(2, 0u32).is_err());
        assert!(collapsed_init::<f64>(2, 4u32).is_err());
        assert!(collapsed_init::<f64>(0, 1u32).is_err());
        assert!(collapsed_trace::<f64>(3, 1u32, 0).is_err());
    }

    #[test]
    fn two_qubit_single_step_is_exact() {
        let s = collapsed_iterate(&collapsed_init::<f64>(2, 1u32).unwrap());
        assert!((s.a() - 1.0).abs() < 1e-15);
        assert!(s.b().abs() < 1e-15);
    }

    #[test]
    fn three_qubit_two_steps() {
        let s0 = collapsed_init::<f64>(3, 1u32).unwrap();
        let s2 = collapsed_iterate(&collapsed_iterate(&s0));
        assert!((s2.a() * s2.a() - 0.9453125).abs() < 1e-12);
    }

    #[test]
    fn recurrence_matches_closed_form() {
        for (n, m) in [(3usize, 1u64), (5, 3), (10, 1), (20, 7), (64, 1), (64, 5)] {
            let init = collapsed_init::<f64>(n, m).unwrap();
            let mut s = init.clone();
            for k in 1..=100u64 {
                s = collapsed_iterate(&s);
                let closed = init.jump_to(k);
                assert!(
                    (s.a_scaled - closed.a_scaled).abs() < 1e-9,
                    "n={n} M={m} k={k}"
                );
                assert!(
                    (s.b_scaled - closed.b_scaled).abs() < 1e-9,
                    "n={n} M={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn n64_optimum_without_vectors() {
        let jump = jump_to_optimal::<f64>(64, 1u32).unwrap();
        let expected = (std::f64::consts::FRAC_PI_4 * 2f64.powi(32)).round() as u64;
        assert!(
            jump.iterations.abs_diff(expected) <= 1,
            "{}",
            jump.iterations
        );
        assert!(jump.state.p_marked() > 1.0 - 1e-9);
    }

    #[test]
    fn log_sampled_trace_points() {
        let t = collapsed_trace_sampled::<f64>(10, 1u32, 25, Sampling::Log2).unwrap();
        let its: Vec<u64> = t.records.iter().map(|r| r.iteration).collect();
        assert_eq!(its, vec![0, 1, 2, 4, 8, 16, 25]);
        let full = collapsed_trace::<f64>(10, 1u32, 25).unwrap();
        for r in &t.records {
            let f = full.record_at(r.iteration).unwrap();
            assert!((r.p_marked - f.p_marked).abs() < 1e-9);
            assert!((r.entropy_bits - f.entropy_bits).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_extremes() {
        // n = 2, M = 1 after one step is a point mass
        let s = collapsed_iterate(&collapsed_init::<f64>(2, 1u32).unwrap());
        assert!(s.entropy_bits() < 1e-12);
        // M = 2 of 4 at start: uniform
        let s = collapsed_init::<f64>(2, 2u32).unwrap();
        assert!((s.entropy_bits() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn renormalization_only_on_drift() {
        let mut s = collapsed_init::<f64>(8, 3u32).unwrap();
        assert!(!s.renormalize_if_drifted());
        s.a_scaled *= 1.001;
        assert!(s.renormalize_if_drifted());
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_seeded_and_splits_classes() {
        let marked = MarkedSet::parse(3, ["011", "101"]).unwrap();
        let s = collapsed_iterate(&collapsed_init::<f64>(3, 2u32).unwrap());
        let a = sample_collapsed(&s, &marked, 500, 3);
        assert_eq!(a, sample_collapsed(&s, &marked, 500, 3));
        assert!(a.iter().all(|o| marked.contains(&o.answer_bits)));
        let wide = MarkedSet::parse(70, ["1".repeat(70).as_str()]).unwrap();
        let s = collapsed_init::<f64>(70, 1u32).unwrap();
        let o = sample_collapsed(&s, &wide, 10, 1);
        assert!(o.iter().all(|o| o.raw_bits.len() == 71));
    }

    #[test]
    fn entropy_stop_matches_optimum() {
        let (state, trace, k) = collapsed_run_until_entropy_stop::<f64>(3, 1u32, 1, 100).unwrap();
        assert_eq!(k, 2);
        assert_eq!(trace.records.len(), 3);
        assert_eq!(state.iteration(), 2);
        assert!(collapsed_run_until_entropy_stop::<f64>(2, 2u32, 1, 50).is_err());
    }

    #[test]
    fn works_in_f32() {
        let s0 = collapsed_init::<f32>(3, 1u32).unwrap();
        let s2 = collapsed_iterate(&collapsed_iterate(&s0));
        assert!((s2.p_marked() - 0.9453125).abs() < 1e-5);
    }
}
