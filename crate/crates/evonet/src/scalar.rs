//! Scalar abstraction for the numeric kernels.

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the statistical kernels are generic over: f32 or f64.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + std::iter::Sum<Self>
    + std::ops::AddAssign
    + std::fmt::Debug
    + std::fmt::Display
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + std::iter::Sum<T>
        + std::ops::AddAssign
        + std::fmt::Debug
        + std::fmt::Display
        + 'static
{
}

/// Lossless for f64, rounding for f32. Panics only on NaN literals.
pub(crate) fn cast<F: Real>(x: f64) -> F {
    F::from(x).expect("f64 literal representable in scalar type")
}
