//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used when validating normalisation of states and spectra.
    ///
    /// `1e-12` in double precision, widened to a few thousand ulps for
    /// narrower types.
    #[inline]
    fn norm_tolerance() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(4096.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

/// Table of `ω^m = exp(2πi m / n)` for `m = 0..n`.
pub(crate) fn roots_of_unity<T: Real>(n: usize) -> Vec<C<T>> {
    let nf = T::from_usize_lossy(n);
    (0..n)
        .map(|m| {
            let angle = T::TAU() * T::from_usize_lossy(m) / nf;
            Complex::from_polar(T::one(), angle)
        })
        .collect()
}
