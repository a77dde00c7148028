//! Scalar abstraction shared by the numeric modules.
//!
//! Everything that touches amplitudes is generic over [`Real`], implemented
//! for `f64` (the production path) and `f32`. Tolerances that are quoted as
//! absolute numbers like `1e-10` only make sense in double precision, so each
//! scalar carries its own normalization tolerance.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Largest accepted `|Σ|x_j|² − 1|` for a state vector.
    fn norm_tolerance() -> Self;

    /// Amplitudes below this magnitude count as zero (phase anchor, sign tie-break).
    fn zero_amplitude() -> Self;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }
}

impl Real for f64 {
    fn norm_tolerance() -> Self {
        1e-10
    }
    fn zero_amplitude() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
    fn zero_amplitude() -> Self {
        1e-6
    }
}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}
