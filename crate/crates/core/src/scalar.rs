//! Scalar types usable as polytope weights.
//!
//! Floating-point scalars carry a nonzero unit roundoff that the cube
//! enumerator uses to size its guard band; exact scalars (integers and
//! rationals) report zero and are summed incrementally without resyncs.

use num_rational::Rational64;
use num_traits::{Num, Signed};
use std::fmt::Debug;

/// A weight type over which halfspaces can be evaluated.
pub trait Scalar: Copy + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// Machine epsilon of `+`/`-`, or `0.0` when arithmetic is exact.
    const ROUNDING: f64;

    fn to_f64(self) -> f64;
    fn from_i64(v: i64) -> Self;

    /// True when the value is finite (always true for exact types).
    fn is_finite_value(self) -> bool {
        true
    }
}

/// Scalars whose additions never round. Surface detection (`A_i u = b_i`)
/// is only meaningful for these.
pub trait ExactScalar: Scalar {}

/// Scalars for which halving is exact or correctly rounded, as needed by
/// the `{0,1}` to `{-1,+1}` change of variables.
pub trait Halvable: Scalar {
    fn half(self) -> Self;
}

impl Scalar for f64 {
    const ROUNDING: f64 = f64::EPSILON;
    fn to_f64(self) -> f64 {
        self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    const ROUNDING: f64 = f32::EPSILON as f64;
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_i64(v: i64) -> Self {
        v as f32
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for i64 {
    const ROUNDING: f64 = 0.0;
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn from_i64(v: i64) -> Self {
        v
    }
}

impl Scalar for Rational64 {
    const ROUNDING: f64 = 0.0;
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn from_i64(v: i64) -> Self {
        Rational64::from_integer(v)
    }
}

impl ExactScalar for i64 {}
impl ExactScalar for Rational64 {}

impl Halvable for f64 {
    fn half(self) -> Self {
        self * 0.5
    }
}

impl Halvable for f32 {
    fn half(self) -> Self {
        self * 0.5
    }
}

impl Halvable for Rational64 {
    fn half(self) -> Self {
        self / Rational64::from_integer(2)
    }
}

/// True when `x` is a multiple of `2^-10` small enough that sums of up to a
/// few million such values are exact in binary64.
pub(crate) fn is_coarse_dyadic(x: f64) -> bool {
    let scaled = x * 1024.0;
    scaled.is_finite() && scaled.fract() == 0.0 && scaled.abs() < (1u64 << 40) as f64
}
