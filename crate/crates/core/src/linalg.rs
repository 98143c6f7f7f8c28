//! Dense complex linear algebra: tensor product, matrix product, adjoint and
//! state application, plus an index-map representation for permutation
//! operators.
//!
//! Every operator has a power-of-two dimension. Dense dimensions are bounded
//! by a process-wide cap ([`dense_cap`], default `2^12`); exceeding it yields
//! [`Error::Capacity`], which callers should treat as "use the collapsed
//! Grover backend instead".

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::state::QuantumState;

pub const DEFAULT_DENSE_CAP: usize = 1 << 12;

static DENSE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DENSE_CAP);

// rows below this many are multiplied serially
const PAR_MIN_DIM: usize = 64;

pub fn dense_cap() -> usize {
    DENSE_CAP.load(Ordering::Relaxed)
}

/// Sets the maximum dense dimension. Must be a power of two.
pub fn set_dense_cap(cap: usize) -> Result<()> {
    if !cap.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(cap));
    }
    DENSE_CAP.store(cap, Ordering::Relaxed);
    Ok(())
}

/// `2^qubits`, or a capacity error when it exceeds the dense cap.
pub fn checked_dim(qubits: usize) -> Result<usize> {
    let cap = dense_cap();
    if qubits >= 127 || (1u128 << qubits) > cap as u128 {
        return Err(Error::Capacity {
            requested: if qubits >= 127 {
                u128::MAX
            } else {
                1u128 << qubits
            },
            cap,
        });
    }
    Ok(1usize << qubits)
}

#[inline]
fn c<T: Scalar>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseOperator<T: Scalar> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> DenseOperator<T> {
    pub fn from_entries(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if dim > dense_cap() {
            return Err(Error::Capacity {
                requested: dim as u128,
                cap: dense_cap(),
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite operator entry".into()));
        }
        Ok(Self { dim, entries })
    }

    /// Builds from real rows; convenient for the real-valued gates used here.
    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| c(x)));
        }
        Self::from_entries(dim, entries)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        checked_dim(dim.trailing_zeros() as usize)?;
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self::from_entries(dim, entries)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |i, j| if i == j { c(T::one()) } else { c(T::zero()) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        tensor(self, rhs)
    }

    /// Matrix product `self · rhs`.
    pub fn dot(&self, rhs: &Self) -> Result<Self> {
        dot(self, rhs)
    }

    pub fn adjoint(&self) -> Self {
        conjugate_transpose(self)
    }

    pub fn apply(&self, state: &QuantumState<T>) -> Result<QuantumState<T>> {
        apply(self, state)
    }

    /// Largest entrywise modulus of `self · self† - I`.
    pub fn unitarity_deviation(&self) -> T {
        let product = dot(self, &conjugate_transpose(self)).expect("square operands");
        (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .map(|(i, j)| {
                let target = if i == j { T::one() } else { T::zero() };
                (product.get(i, j) - c(target)).norm()
            })
            .fold(T::zero(), T::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= T::tolerance()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    /// Nested `[re, im]` rows, for JSON export.
    pub fn to_nested(&self) -> Vec<Vec<[T; 2]>> {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }
}

/// Kronecker product. Row `(i_a, i_b)` maps to `i_a * b.dim + i_b`, so the
/// left operand acts on the more significant qubits.
pub fn tensor<T: Scalar>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> Result<DenseOperator<T>> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&d| d <= dense_cap())
        .ok_or(Error::Capacity {
            requested: a.dim as u128 * b.dim as u128,
            cap: dense_cap(),
        })?;
    let mut entries = vec![c(T::zero()); dim * dim];
    for ia in 0..a.dim {
        for ja in 0..a.dim {
            let s = a.get(ia, ja);
            if s.re == T::zero() && s.im == T::zero() {
                continue;
            }
            for ib in 0..b.dim {
                let row = (ia * b.dim + ib) * dim + ja * b.dim;
                for (jb, &v) in b.row(ib).iter().enumerate() {
                    entries[row + jb] = s * v;
                }
            }
        }
    }
    Ok(DenseOperator { dim, entries })
}

/// Tensor product of a sequence of operators, left to right.
pub fn tensor_all<'a, T: Scalar>(
    ops: impl IntoIterator<Item = &'a DenseOperator<T>>,
) -> Result<DenseOperator<T>> {
    let mut acc = DenseOperator::identity(1)?;
    for op in ops {
        acc = tensor(&acc, op)?;
    }
    Ok(acc)
}

/// Matrix product. Each output entry accumulates over the inner index in
/// ascending order, so results do not depend on thread scheduling.
pub fn dot<T: Scalar>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> Result<DenseOperator<T>> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let dim = a.dim;
    let mut entries = vec![c(T::zero()); dim * dim];
    let fill_row = |(i, out): (usize, &mut [Complex<T>])| {
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik.re == T::zero() && aik.im == T::zero() {
                continue;
            }
            for (o, &bkj) in out.iter_mut().zip(b.row(k)) {
                *o = *o + aik * bkj;
            }
        }
    };
    if dim >= PAR_MIN_DIM {
        entries.par_chunks_mut(dim).enumerate().for_each(fill_row);
    } else {
        entries.chunks_mut(dim).enumerate().for_each(fill_row);
    }
    Ok(DenseOperator { dim, entries })
}

pub fn conjugate_transpose<T: Scalar>(a: &DenseOperator<T>) -> DenseOperator<T> {
    let dim = a.dim;
    let entries = (0..dim * dim)
        .map(|k| a.get(k % dim, k / dim).conj())
        .collect();
    DenseOperator { dim, entries }
}

/// `op · state`.
pub fn apply<T: Scalar>(op: &DenseOperator<T>, state: &QuantumState<T>) -> Result<QuantumState<T>> {
    if op.dim != state.dim() {
        return Err(Error::DimensionMismatch {
            left: op.dim,
            right: state.dim(),
        });
    }
    let psi = state.amplitudes();
    let row_dot = |i: usize| {
        op.row(i)
            .iter()
            .zip(psi)
            .fold(c(T::zero()), |acc, (&u, &v)| acc + u * v)
    };
    let out: Vec<Complex<T>> = if op.dim >= PAR_MIN_DIM {
        (0..op.dim).into_par_iter().map(row_dot).collect()
    } else {
        (0..op.dim).map(row_dot).collect()
    };
    QuantumState::from_amplitudes_unnormalized(out)
}

/// Permutation operator stored as an index map: `U|j> = |map[j]>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermutationOperator {
    map: Vec<usize>,
}

impl PermutationOperator {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let dim = map.len();
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let mut seen = vec![false; dim];
        for (j, &i) in map.iter().enumerate() {
            if i >= dim {
                return Err(Error::NotBijective(format!(
                    "image {i} of {j} out of range"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::NotBijective(format!("index {i} has two preimages")));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new((0..dim).collect())
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    /// Image of basis index `j`.
    pub fn image(&self, j: usize) -> usize {
        self.map[j]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (j, &i) in self.map.iter().enumerate() {
            inv[i] = j;
        }
        Self { map: inv }
    }

    /// `self · rhs` as permutations: first `rhs`, then `self`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        Ok(Self {
            map: rhs.map.iter().map(|&k| self.map[k]).collect(),
        })
    }

    pub fn apply<T: Scalar>(&self, state: &QuantumState<T>) -> Result<QuantumState<T>> {
        if self.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: state.dim(),
            });
        }
        let mut out = vec![c(T::zero()); self.dim()];
        for (j, &a) in state.amplitudes().iter().enumerate() {
            out[self.map[j]] = a;
        }
        QuantumState::from_amplitudes_unnormalized(out)
    }

    /// 0/1 matrix with `[U]_{ij} = 1` iff `U|j> = |i>`.
    pub fn to_dense<T: Scalar>(&self) -> Result<DenseOperator<T>> {
        let dim = self.dim();
        checked_dim(dim.trailing_zeros() as usize)?;
        let mut entries = vec![c(T::zero()); dim * dim];
        for (j, &i) in self.map.iter().enumerate() {
            entries[i * dim + j] = c(T::one());
        }
        Ok(DenseOperator { dim, entries })
    }

    /// Exact inverse of [`to_dense`](Self::to_dense): every entry must be
    /// exactly 0 or 1 with a single 1 per row and column.
    pub fn from_dense<T: Scalar>(op: &DenseOperator<T>) -> Result<Self> {
        let dim = op.dim();
        let mut map = vec![usize::MAX; dim];
        for i in 0..dim {
            for (j, slot) in map.iter_mut().enumerate() {
                let z = op.get(i, j);
                if z.im != T::zero() || (z.re != T::zero() && z.re != T::one()) {
                    return Err(Error::NotPermutation(format!("entry ({i}, {j}) is {z}")));
                }
                if z.re == T::one() {
                    if *slot != usize::MAX {
                        return Err(Error::NotPermutation(format!("column {j} has two ones")));
                    }
                    *slot = i;
                }
            }
        }
        if let Some(j) = map.iter().position(|&i| i == usize::MAX) {
            return Err(Error::NotPermutation(format!("column {j} has no one")));
        }
        Self::new(map).map_err(|e| Error::NotPermutation(e.to_string()))
    }
}

/// Operator in whichever representation is cheapest to apply.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Operator<T: Scalar> {
    Dense(DenseOperator<T>),
    Permutation(PermutationOperator),
}

impl<T: Scalar> Operator<T> {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense(d) => d.dim(),
            Operator::Permutation(p) => p.dim(),
        }
    }

    pub fn apply(&self, state: &QuantumState<T>) -> Result<QuantumState<T>> {
        match self {
            Operator::Dense(d) => apply(d, state),
            Operator::Permutation(p) => p.apply(state),
        }
    }

    pub fn to_dense(&self) -> Result<DenseOperator<T>> {
        match self {
            Operator::Dense(d) => Ok(d.clone()),
            Operator::Permutation(p) => p.to_dense(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        match self {
            Operator::Dense(d) => d.is_unitary(),
            Operator::Permutation(_) => true,
        }
    }
}

impl<T: Scalar> From<DenseOperator<T>> for Operator<T> {
    fn from(d: DenseOperator<T>) -> Self {
        Operator::Dense(d)
    }
}

impl<T: Scalar> From<PermutationOperator> for Operator<T> {
    fn from(p: PermutationOperator) -> Self {
        Operator::Permutation(p)
    }
}
