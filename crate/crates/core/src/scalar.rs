//! Real scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type backing amplitudes and operator entries: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
    /// Absolute entrywise tolerance for unitarity and equality checks.
    fn tolerance() -> Self;

    /// Looser tolerance for accumulated quantities such as norms and probability sums.
    fn norm_tolerance() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize is representable in every Scalar")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }

    fn norm_tolerance() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn norm_tolerance() -> Self {
        1e-4
    }
}
