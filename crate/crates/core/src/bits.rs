//! Binary strings and the MSB-first basis index convention.
//!
//! The ket `|x0 x1 ... x(k-1)>` is basis index `sum x_i * 2^(k-1-i)`, so the
//! leftmost character is the most significant bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    /// Bit string of width `len` for basis index `index`.
    ///
    /// Panics if `index` needs more than `len` bits.
    pub fn from_index(index: usize, len: usize) -> Self {
        assert!(
            len >= usize::BITS as usize || index >> len == 0,
            "index {index} does not fit in {len} bits"
        );
        let bits = (0..len)
            .map(|i| {
                let shift = len - 1 - i;
                shift < usize::BITS as usize && (index >> shift) & 1 == 1
            })
            .collect();
        Self { bits }
    }

    /// Basis index under the MSB-first convention, if it fits in a `usize`.
    pub fn to_index(&self) -> Option<usize> {
        let mut index: usize = 0;
        for &b in &self.bits {
            index = index.checked_mul(2)?;
            index |= b as usize;
        }
        Some(index)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    /// Splits into the first `at` bits and the remainder.
    pub fn split_at(&self, at: usize) -> (BitString, BitString) {
        let (l, r) = self.bits.split_at(at);
        (BitString::new(l.to_vec()), BitString::new(r.to_vec()))
    }

    /// Digit-wise exclusive OR. Both strings must have equal length.
    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len(), other.len(), "xor of unequal lengths");
        BitString {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidBits {
                value: s.to_string(),
                reason: "empty string".into(),
            });
        }
        let bits = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBits {
                    value: s.to_string(),
                    reason: format!("character {other:?} at position {i} is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
