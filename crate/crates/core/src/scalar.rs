//! Scalar abstraction for all numerical routines.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real scalar type used throughout the crate, implemented for `f32` and `f64`.
///
/// Everything numeric (matrices, priors, game values, SDP solutions) is generic
/// over this trait; the crate root exports `f64` and `f32` aliases for the main
/// types. All shipped tolerances are calibrated for `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    /// Converts the scalar to `f64` (exact for f64, widening for f32).
    fn to_f64c(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssignOps
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}
