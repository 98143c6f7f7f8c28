//! Truth table to unitary oracle.
//!
//! A function `f: {0,1}^n -> {0,1}^m` is first extended to the bijection
//! `F(x, y) = (x, f(x) XOR y)` on `n + m` bits, then every bit string is sent
//! to its canonical basis ket, and finally `F` is read off as the permutation
//! `U_F |s> = |F(s)>`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::{checked_dim, PermutationOperator};
use crate::scalar::Scalar;
use crate::state::QuantumState;

// exhaustive tables beyond this many input bits are not materialized
const MAX_TABLE_BITS: usize = 24;

/// Exhaustive map `{0,1}^n -> {0,1}^m`, row `i` holding `f` of the input
/// whose MSB-first index is `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    m: usize,
    outputs: Vec<BitString>,
}

impl TruthTable {
    pub fn new(n: usize, m: usize, outputs: Vec<BitString>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidTable("n and m must be positive".into()));
        }
        if n > MAX_TABLE_BITS {
            return Err(Error::InvalidTable(format!(
                "n = {n} exceeds the exhaustive table limit of {MAX_TABLE_BITS} bits"
            )));
        }
        if outputs.len() != 1 << n {
            return Err(Error::InvalidTable(format!(
                "expected {} rows, got {}",
                1usize << n,
                outputs.len()
            )));
        }
        if let Some((i, bad)) = outputs.iter().enumerate().find(|(_, o)| o.len() != m) {
            return Err(Error::InvalidTable(format!(
                "row {}: output {bad} has length {}, expected {m}",
                BitString::from_index(i, n),
                bad.len()
            )));
        }
        Ok(Self { n, m, outputs })
    }

    /// Builds from string rows, rejecting missing, duplicate or malformed keys.
    pub fn from_rows<'a>(
        n: usize,
        m: usize,
        rows: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_TABLE_BITS {
            return Err(Error::InvalidTable(format!(
                "n = {n} must be in 1..={MAX_TABLE_BITS}"
            )));
        }
        let mut outputs: Vec<Option<BitString>> = vec![None; 1 << n];
        for (key, value) in rows {
            let input: BitString = key
                .parse()
                .map_err(|e| Error::InvalidTable(format!("row {key:?}: {e}")))?;
            if input.len() != n {
                return Err(Error::InvalidTable(format!(
                    "row {key:?}: input has length {}, expected {n}",
                    input.len()
                )));
            }
            let output: BitString = value
                .parse()
                .map_err(|e| Error::InvalidTable(format!("row {key:?}: {e}")))?;
            if output.len() != m {
                return Err(Error::InvalidTable(format!(
                    "row {key:?}: output {value:?} has length {}, expected {m}",
                    output.len()
                )));
            }
            let slot = &mut outputs[input.to_index().expect("n is bounded")];
            if slot.replace(output).is_some() {
                return Err(Error::InvalidTable(format!("row {key:?} appears twice")));
            }
        }
        let missing: Vec<String> = outputs
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_none())
            .map(|(i, _)| BitString::from_index(i, n).to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidTable(format!(
                "missing rows: {}",
                missing.join(", ")
            )));
        }
        Self::new(n, m, outputs.into_iter().map(Option::unwrap).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eval(&self, x: &BitString) -> &BitString {
        &self.outputs[x.to_index().expect("input width is n")]
    }

    pub fn eval_index(&self, x: usize) -> &BitString {
        &self.outputs[x]
    }

    pub fn rows(&self) -> impl Iterator<Item = (BitString, &BitString)> + '_ {
        self.outputs
            .iter()
            .enumerate()
            .map(|(i, o)| (BitString::from_index(i, self.n), o))
    }

    /// Inputs whose image is non-zero, as MSB-first indices.
    pub fn support(&self) -> Vec<usize> {
        self.outputs
            .iter()
            .enumerate()
            .filter(|(_, o)| !o.is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Non-empty proper subset of `{0,1}^n`: the Grover search targets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkedSet {
    n: usize,
    elements: BTreeSet<BitString>,
}

impl MarkedSet {
    pub fn new(n: usize, elements: impl IntoIterator<Item = BitString>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMarkedSet("n must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for e in elements {
            if e.len() != n {
                return Err(Error::InvalidMarkedSet(format!(
                    "element {e} has length {}, expected {n}",
                    e.len()
                )));
            }
            if !set.insert(e.clone()) {
                return Err(Error::InvalidMarkedSet(format!("element {e} repeated")));
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidMarkedSet("marked set is empty".into()));
        }
        if n < 64 && set.len() as u64 >= 1u64 << n {
            return Err(Error::InvalidMarkedSet(format!(
                "all {} strings are marked",
                set.len()
            )));
        }
        Ok(Self { n, elements: set })
    }

    pub fn parse<'a>(n: usize, items: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let bits = items
            .into_iter()
            .map(|s| s.trim().parse::<BitString>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.elements.contains(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitString> {
        self.elements.iter()
    }

    /// Basis indices of the marked strings; `None` if `n` is too wide.
    pub fn indices(&self) -> Option<Vec<usize>> {
        self.elements.iter().map(BitString::to_index).collect()
    }
}

/// Bijection on `{0,1}^(n+m)` stored as an index map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectiveTable {
    n: usize,
    m: usize,
    map: Vec<usize>,
}

impl InjectiveTable {
    /// Validates that `map` is a bijection preserving the leading `n` bits.
    pub fn new(n: usize, m: usize, map: Vec<usize>) -> Result<Self> {
        let width = n + m;
        if map.len() != 1 << width {
            return Err(Error::InvalidTable(format!(
                "expected {} rows, got {}",
                1usize << width,
                map.len()
            )));
        }
        let mut image = BTreeSet::new();
        for (s, &t) in map.iter().enumerate() {
            if t >> width != 0 {
                return Err(Error::NotBijective(format!("image {t} out of range")));
            }
            if s >> m != t >> m {
                return Err(Error::InvalidTable(format!(
                    "row {} changes the input register",
                    BitString::from_index(s, width)
                )));
            }
            image.insert(t);
        }
        if image.len() != map.len() {
            return Err(Error::NotBijective(format!(
                "{} distinct images for {} inputs",
                image.len(),
                map.len()
            )));
        }
        Ok(Self { n, m, map })
    }

    pub fn width(&self) -> usize {
        self.n + self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn apply(&self, s: &BitString) -> BitString {
        let i = s.to_index().expect("width is bounded");
        BitString::from_index(self.map[i], self.width())
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn rows(&self) -> impl Iterator<Item = (BitString, BitString)> + '_ {
        let w = self.width();
        self.map
            .iter()
            .enumerate()
            .map(move |(s, &t)| (BitString::from_index(s, w), BitString::from_index(t, w)))
    }
}

/// `f_marked(x) = 1` iff `x` is marked.
pub fn truth_table_from_marked(marked: &MarkedSet) -> Result<TruthTable> {
    let n = marked.n();
    if n > MAX_TABLE_BITS {
        return Err(Error::InvalidTable(format!(
            "n = {n} exceeds the exhaustive table limit of {MAX_TABLE_BITS} bits"
        )));
    }
    let one = BitString::new(vec![true]);
    let zero = BitString::new(vec![false]);
    let outputs = (0..1usize << n)
        .map(|i| {
            if marked.contains(&BitString::from_index(i, n)) {
                one.clone()
            } else {
                zero.clone()
            }
        })
        .collect();
    TruthTable::new(n, 1, outputs)
}

/// `F(x, y) = (x, f(x) XOR y)`.
pub fn injective_extension(f: &TruthTable) -> InjectiveTable {
    let (n, m) = (f.n(), f.m());
    let map = (0..1usize << (n + m))
        .map(|s| {
            let x = s >> m;
            let y = s & ((1 << m) - 1);
            let fx = f.eval_index(x).to_index().expect("m is bounded");
            (x << m) | (fx ^ y)
        })
        .collect();
    InjectiveTable::new(n, m, map).expect("XOR extension is always a bijection")
}

/// Code map: `tau(b0 b1 ...) = tau(b0) ⊗ tau(b1) ⊗ ...` with
/// `tau(0) = (1, 0)` and `tau(1) = (0, 1)`.
pub fn code_map<T: Scalar>(bits: &BitString) -> Result<QuantumState<T>> {
    if bits.is_empty() {
        return Err(Error::InvalidBits {
            value: String::new(),
            reason: "empty string".into(),
        });
    }
    checked_dim(bits.len())?;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut v = vec![one];
    for &b in bits.as_slice() {
        let tau = if b { [zero, one] } else { [one, zero] };
        v = v
            .iter()
            .flat_map(|&a| tau.iter().map(move |&t| a * t))
            .collect();
    }
    QuantumState::from_amplitudes(v)
}

/// `[U_F]_{ij} = 1` iff `U_F|j> = |i>`, as an index map.
pub fn permutation_operator(table: &InjectiveTable) -> Result<PermutationOperator> {
    PermutationOperator::new(table.map().to_vec())
}

/// Problem description accepted on disk: either a full table or the
/// Grover marked-set shorthand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    Table(TruthTable),
    Marked(MarkedSet),
}

impl Problem {
    pub fn n(&self) -> usize {
        match self {
            Problem::Table(t) => t.n(),
            Problem::Marked(s) => s.n(),
        }
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        match self {
            Problem::Table(t) => Ok(t.clone()),
            Problem::Marked(s) => truth_table_from_marked(s),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawProblem = serde_json::from_str(text)
            .map_err(|e| Error::InvalidTable(format!("malformed JSON: {e}")))?;
        raw.validate()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    n: usize,
    m: Option<usize>,
    rows: Option<BTreeMap<String, String>>,
    marked: Option<Vec<String>>,
}

impl RawProblem {
    fn validate(self) -> Result<Problem> {
        match (self.rows, self.marked) {
            (Some(rows), None) => {
                let m = self
                    .m
                    .ok_or_else(|| Error::InvalidTable("\"rows\" requires \"m\"".into()))?;
                let table = TruthTable::from_rows(
                    self.n,
                    m,
                    rows.iter().map(|(k, v)| (k.as_str(), v.as_str())),
                )?;
                Ok(Problem::Table(table))
            }
            (None, Some(marked)) => {
                if self.m.is_some_and(|m| m != 1) {
                    return Err(Error::InvalidTable("marked sets imply m = 1".into()));
                }
                Ok(Problem::Marked(MarkedSet::parse(
                    self.n,
                    marked.iter().map(String::as_str),
                )?))
            }
            (Some(_), Some(_)) => Err(Error::InvalidTable(
                "give either \"rows\" or \"marked\", not both".into(),
            )),
            (None, None) => Err(Error::InvalidTable(
                "one of \"rows\" or \"marked\" is required".into(),
            )),
        }
    }
}
