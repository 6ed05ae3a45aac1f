//! Scalar abstraction over the floating-point types the library supports.
//!
//! All numerical kernels are generic over [`Real`], which bundles the
//! `num-traits` float machinery with the bounds `rustfft` needs. Concrete
//! aliases for the common `f64` instantiation live at the crate root.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar usable throughout the library (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Display
    + LowerExp
    + Debug
{
    /// Converts an `f64` constant into the scalar type.
    ///
    /// This is the designated way to write literals in generic code:
    /// `T::of(0.5)`.
    fn of(x: f64) -> Self;

    /// Views the scalar as `f64` (lossless for both supported types).
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> f32 {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> f64 {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}
