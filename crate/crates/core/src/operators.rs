//! Named operators and the superposition / entanglement / interference gate
//! skeleton for the Grover and Deutsch-Jozsa algorithms.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::Serialize;

use crate::encoder::MarkedSet;
use crate::error::{Error, Result};
use crate::linalg::{checked_dim, dot, tensor, DenseOperator, Operator};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Grover,
    DeutschJozsa,
    Simon,
    Shor,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Grover => "grover",
            Algorithm::DeutschJozsa => "deutsch-jozsa",
            Algorithm::Simon => "simon",
            Algorithm::Shor => "shor",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grover" => Ok(Algorithm::Grover),
            "deutsch-jozsa" | "dj" => Ok(Algorithm::DeutschJozsa),
            "simon" => Ok(Algorithm::Simon),
            "shor" => Ok(Algorithm::Shor),
            other => Err(Error::Unsupported(other.to_string())),
        }
    }
}

fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

pub fn hadamard<T: Scalar>() -> DenseOperator<T> {
    hadamard_word(1).expect("2x2 is within any cap")
}

/// `H ⊗ ... ⊗ H` on `k` qubits. Entry `(i, j)` is `(-1)^popcount(i & j) / 2^(k/2)`.
pub fn hadamard_word<T: Scalar>(k: usize) -> Result<DenseOperator<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("hadamard word needs k >= 1".into()));
    }
    let dim = checked_dim(k)?;
    let half = T::one() / T::two();
    let mut scale = half.powi((k / 2) as i32);
    if k % 2 == 1 {
        scale = scale * T::FRAC_1_SQRT_2();
    }
    DenseOperator::from_fn(dim, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            real(scale)
        } else {
            real(-scale)
        }
    })
}

pub fn identity_word<T: Scalar>(k: usize) -> Result<DenseOperator<T>> {
    DenseOperator::identity(checked_dim(k)?)
}

/// Diffusion matrix of order `n`: diagonal `-1 + 1/2^(n-1)`, off-diagonal
/// `1/2^(n-1)`. Acting on real amplitudes it maps `a_x` to `2<a> - a_x`.
pub fn diffusion<T: Scalar>(n: usize) -> Result<DenseOperator<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("diffusion needs n >= 1".into()));
    }
    let dim = checked_dim(n)?;
    let off = T::two() / T::from_usize_lossy(dim);
    let diag = off - T::one();
    DenseOperator::from_fn(dim, |i, j| real(if i == j { diag } else { off }))
}

/// Diffusion built as `-(H^n) · U_0 · (H^n)`, with `U_0` the phase flip of
/// `|0...0>`. Agrees with [`diffusion`] up to roundoff.
pub fn diffusion_from_hadamards<T: Scalar>(n: usize) -> Result<DenseOperator<T>> {
    let hn = hadamard_word::<T>(n)?;
    let zero = MarkedSet::new(n, [crate::bits::BitString::zeros(n)])?;
    let flip = phase_oracle::<T>(&zero)?;
    let inner = dot(&dot(&hn, &flip)?, &hn)?;
    let dim = inner.dim();
    DenseOperator::from_entries(dim, inner.entries().iter().map(|z| -z).collect())
}

/// Diagonal `±1` operator with `-1` exactly on the marked basis indices.
pub fn phase_oracle<T: Scalar>(marked: &MarkedSet) -> Result<DenseOperator<T>> {
    let dim = checked_dim(marked.n())?;
    let indices = marked.indices().expect("width bounded by the dense cap");
    let mut flip = vec![false; dim];
    for i in indices {
        flip[i] = true;
    }
    DenseOperator::from_fn(dim, |i, j| {
        if i != j {
            real(T::zero())
        } else if flip[i] {
            real(-T::one())
        } else {
            real(T::one())
        }
    })
}

/// Superposition, entanglement and interference stages for one algorithm on
/// `n` input qubits and one ancilla.
///
/// Execution applies `superposition` once, then `iterations` rounds of
/// `entanglement` followed by `interference`. The exponent `h` of the
/// symbolic gate is `iterations - 1`.
#[derive(Clone, Debug)]
pub struct GateAssembly<T: Scalar> {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub superposition: DenseOperator<T>,
    pub entanglement: Operator<T>,
    pub interference: DenseOperator<T>,
    pub iterations: u64,
    /// Inputs `x` with `f(x) = 1`, as MSB-first indices of the `n`-qubit register.
    pub marked: Vec<usize>,
}

impl<T: Scalar> GateAssembly<T> {
    pub fn h(&self) -> u64 {
        self.iterations.saturating_sub(1)
    }

    pub fn qubits(&self) -> usize {
        self.n + self.m
    }

    pub fn with_iterations(mut self, iterations: u64) -> Self {
        self.iterations = iterations;
        self
    }

    /// One pass `interference · entanglement · superposition` as a dense matrix.
    pub fn gate(&self) -> Result<DenseOperator<T>> {
        let uf = self.entanglement.to_dense()?;
        dot(&dot(&self.interference, &uf)?, &self.superposition)
    }

    /// `(interference · entanglement)^rounds · superposition`.
    pub fn compose(&self, rounds: u64) -> Result<DenseOperator<T>> {
        let uf = self.entanglement.to_dense()?;
        let step = dot(&self.interference, &uf)?;
        let mut acc = self.superposition.clone();
        for _ in 0..rounds {
            acc = dot(&step, &acc)?;
        }
        Ok(acc)
    }
}

/// Inputs `x` for which the oracle sends `|x, 0>` to `|x, 1>`.
fn oracle_support<T: Scalar>(oracle: &Operator<T>, n: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|&x| match oracle {
            Operator::Permutation(p) => p.image(x << 1) == (x << 1) | 1,
            Operator::Dense(d) => {
                (d.get((x << 1) | 1, x << 1) - real(T::one())).norm() <= T::tolerance()
            }
        })
        .collect()
}

/// Builds the stages for `algorithm` around an `n + 1`-qubit oracle.
///
/// Grover uses `D_n ⊗ I` for interference and defaults to the optimal
/// iteration count; Deutsch-Jozsa uses `H^n ⊗ I` and a single round.
pub fn assemble<T: Scalar>(
    algorithm: Algorithm,
    n: usize,
    oracle: impl Into<Operator<T>>,
) -> Result<GateAssembly<T>> {
    let oracle = oracle.into();
    if matches!(algorithm, Algorithm::Simon | Algorithm::Shor) {
        return Err(Error::Unsupported(format!(
            "{algorithm} gate assembly is not implemented"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let dim = checked_dim(n + 1)?;
    if oracle.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: oracle.dim(),
        });
    }
    if let Operator::Dense(d) = &oracle {
        let deviation = d.unitarity_deviation();
        if deviation > T::tolerance() {
            return Err(Error::NotUnitary {
                deviation: deviation.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let superposition = hadamard_word(n + 1)?;
    let register_op = match algorithm {
        Algorithm::Grover => diffusion(n)?,
        _ => hadamard_word(n)?,
    };
    let interference = tensor(&register_op, &identity_word(1)?)?;
    let marked = oracle_support(&oracle, n);
    let iterations = match algorithm {
        Algorithm::Grover if !marked.is_empty() && marked.len() < 1 << n => {
            crate::engine::optimal_iterations(n, marked.len() as u128)?
        }
        _ => 1,
    };
    Ok(GateAssembly {
        algorithm,
        n,
        m: 1,
        superposition,
        entanglement: oracle,
        interference,
        iterations,
        marked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{
        injective_extension, permutation_operator, truth_table_from_marked, TruthTable,
    };
    use crate::linalg::{tensor_all, PermutationOperator};
    use crate::state::QuantumState;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Op = DenseOperator<f64>;

    fn grover_oracle(n: usize, items: &[&str]) -> PermutationOperator {
        let marked = MarkedSet::parse(n, items.iter().copied()).unwrap();
        let t = truth_table_from_marked(&marked).unwrap();
        permutation_operator(&injective_extension(&t)).unwrap()
    }

    #[test]
    fn single_hadamard() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h: Op = hadamard();
        assert_eq!(h, Op::from_real_rows(&[vec![s, s], vec![s, -s]]).unwrap());
    }

    #[test]
    fn hadamard_word_matches_tensor_route() {
        for k in 1..=5 {
            let direct: Op = hadamard_word(k).unwrap();
            let h = hadamard();
            let via_tensor = tensor_all(std::iter::repeat_n(&h, k)).unwrap();
            assert!(direct.max_abs_diff(&via_tensor) < 1e-15, "k = {k}");
            let mag = 2f64.powf(-(k as f64) / 2.0);
            assert!(direct
                .entries()
                .iter()
                .all(|z| (z.re.abs() - mag).abs() < 1e-15 && z.im == 0.0));
        }
    }

    #[test]
    fn hadamard_word_uniform_superposition() {
        let out = hadamard_word::<f64>(2)
            .unwrap()
            .apply(&QuantumState::basis(2, 0).unwrap())
            .unwrap();
        for a in out.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn hadamard_word_is_self_inverse() {
        let h3: Op = hadamard_word(3).unwrap();
        assert!(dot(&h3, &h3)
            .unwrap()
            .approx_eq(&Op::identity(8).unwrap(), 1e-12));
        assert!(hadamard_word::<f64>(0).is_err());
        assert!(matches!(
            hadamard_word::<f64>(15),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn diffusion_small_orders() {
        let d1: Op = diffusion(1).unwrap();
        assert_eq!(
            d1,
            Op::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
        );
        let d2: Op = diffusion(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { -0.5 } else { 0.5 };
                assert_eq!(d2.get(i, j), real(expected));
            }
        }
        // D2 · D2 = I4, checked entrywise by brute force
        let mut sq = [[0.0f64; 4]; 4];
        for (i, row) in sq.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| d2.get(i, k).re * d2.get(k, j).re).sum();
            }
        }
        for (i, row) in sq.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn diffusion_agrees_with_hadamard_construction() {
        for n in 1..=6 {
            let a: Op = diffusion(n).unwrap();
            let b: Op = diffusion_from_hadamards(n).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn diffusion_rows_sum_to_one_and_square_to_identity() {
        for n in 1..=8 {
            let d: Op = diffusion(n).unwrap();
            for i in 0..d.dim() {
                let s: f64 = d.row(i).iter().map(|z| z.re).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
            if n <= 6 {
                let sq = dot(&d, &d).unwrap();
                assert!(sq.approx_eq(&Op::identity(d.dim()).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn phase_oracle_flips_marked_diagonal() {
        let marked = MarkedSet::parse(2, ["01"]).unwrap();
        let u: Op = phase_oracle(&marked).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| u.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, 1.0]);
        assert!(u.is_unitary());
    }

    #[test]
    fn ancilla_minus_state_turns_bit_flip_into_phase_flip() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = [real(s), real(-s)];
        for n in 1..=3usize {
            for mask in 1u32..(1 << (1 << n)) - 1 {
                let items: Vec<String> = (0..1usize << n)
                    .filter(|i| (mask >> i) & 1 == 1)
                    .map(|i| crate::bits::BitString::from_index(i, n).to_string())
                    .collect();
                let marked = MarkedSet::parse(n, items.iter().map(String::as_str)).unwrap();
                let uf = permutation_operator(&injective_extension(
                    &truth_table_from_marked(&marked).unwrap(),
                ))
                .unwrap();
                let phase: Op = phase_oracle(&marked).unwrap();
                for x in 0..1usize << n {
                    let mut amps = vec![real(0.0); 2 << n];
                    amps[2 * x] = minus[0];
                    amps[2 * x + 1] = minus[1];
                    let input = QuantumState::from_amplitudes(amps).unwrap();
                    let lhs = uf.apply(&input).unwrap();
                    let px = phase.apply(&QuantumState::basis(n, x).unwrap()).unwrap();
                    let rhs: Vec<Complex<f64>> = px
                        .amplitudes()
                        .iter()
                        .flat_map(|&a| minus.iter().map(move |&b| a * b))
                        .collect();
                    let rhs = QuantumState::from_amplitudes(rhs).unwrap();
                    assert!(lhs.max_abs_diff(&rhs) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn grover_assembly_for_f01() {
        let g = assemble::<f64>(Algorithm::Grover, 2, grover_oracle(2, &["01"])).unwrap();
        assert_eq!(g.superposition, hadamard_word(3).unwrap());
        assert_eq!(
            g.interference,
            tensor(&diffusion(2).unwrap(), &Op::identity(2).unwrap()).unwrap()
        );
        let uf = g.entanglement.to_dense().unwrap();
        assert_eq!(
            PermutationOperator::from_dense(&uf).unwrap().map(),
            &[0, 1, 3, 2, 4, 5, 6, 7]
        );
        assert_eq!(g.marked, vec![1]);
        assert_eq!(g.iterations, 1);
        assert_eq!(g.h(), 0);
        assert!(g.gate().unwrap().is_unitary());
    }

    #[test]
    fn deutsch_jozsa_constant_function() {
        let t = TruthTable::from_rows(2, 1, [("00", "1"), ("01", "1"), ("10", "1"), ("11", "1")])
            .unwrap();
        let uf = permutation_operator(&injective_extension(&t)).unwrap();
        let g = assemble::<f64>(Algorithm::DeutschJozsa, 2, uf).unwrap();
        assert_eq!(g.iterations, 1);
        let out = g
            .gate()
            .unwrap()
            .apply(&QuantumState::basis(3, 1).unwrap())
            .unwrap();
        let p = out.register_probabilities(2);
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_oracle_reduces_gate() {
        let id = PermutationOperator::identity(8).unwrap();
        let g = assemble::<f64>(Algorithm::Grover, 2, id).unwrap();
        assert_eq!(g.h(), 0);
        let expected = dot(&g.interference, &g.superposition).unwrap();
        assert!(g.gate().unwrap().approx_eq(&expected, 0.0));
    }

    #[test]
    fn assemble_rejects_bad_inputs() {
        let id = PermutationOperator::identity(8).unwrap();
        assert!(matches!(
            assemble::<f64>(Algorithm::Simon, 2, id.clone()),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            assemble::<f64>(Algorithm::Shor, 2, id.clone()),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            assemble::<f64>(Algorithm::Grover, 3, id),
            Err(Error::DimensionMismatch { .. })
        ));
        let not_unitary = Op::from_fn(8, |_, _| real(0.5)).unwrap();
        assert!(matches!(
            assemble::<f64>(Algorithm::Grover, 2, not_unitary),
            Err(Error::NotUnitary { .. })
        ));
        assert!("qft".parse::<Algorithm>().is_err());
    }

    #[test]
    fn dense_oracle_support_matches_permutation() {
        let p = grover_oracle(3, &["011", "101"]);
        let dense: Op = p.to_dense().unwrap();
        let a = assemble::<f64>(Algorithm::Grover, 3, dense).unwrap();
        let b = assemble::<f64>(Algorithm::Grover, 3, p).unwrap();
        assert_eq!(a.marked, vec![3, 5]);
        assert_eq!(a.marked, b.marked);
        assert_eq!(a.iterations, 1);
    }

    #[test]
    fn assembled_gates_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = assemble::<f64>(Algorithm::Grover, 3, grover_oracle(3, &["110"])).unwrap();
        let full = g.compose(g.iterations).unwrap();
        assert!(full.unitarity_deviation() < 1e-12);
        for _ in 0..1000 {
            let raw: Vec<Complex<f64>> = (0..16)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let psi =
                QuantumState::from_amplitudes(raw.iter().map(|z| z / norm).collect()).unwrap();
            let out = full.apply(&psi).unwrap();
            assert!((out.norm_sqr().sqrt() - 1.0).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn diffusion_inverts_about_twice_the_mean(
            n in 1usize..=6,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = 1 << n;
            let alpha: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = alpha.iter().sum::<f64>() / dim as f64;
            let d: Op = diffusion(n).unwrap();
            for x in 0..dim {
                let got: f64 = d.row(x).iter().zip(&alpha).map(|(z, a)| z.re * a).sum();
                prop_assert!((got - (2.0 * mean - alpha[x])).abs() < 1e-12);
            }
        }
    }
}
