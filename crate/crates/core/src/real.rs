//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar usable by the grid, spectral and norm machinery.
///
/// Implemented for `f32` and `f64`. Most tolerances quoted in the tests only
/// make sense for `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot
    /// represent finite `f64` values, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Unit roundoff of the type.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `|x|^p` with exact fast paths for the exponents used throughout the crate.
#[inline]
pub fn pow_abs<T: Real>(x: T, p: T) -> T {
    let a = x.abs();
    if p == T::one() {
        a
    } else if p == T::lit(2.0) {
        a * a
    } else if p == T::lit(4.0) {
        let s = a * a;
        s * s
    } else {
        a.powf(p)
    }
}

/// Inverse of [`pow_abs`] for non-negative arguments.
#[inline]
pub fn root<T: Real>(x: T, p: T) -> T {
    if p == T::one() {
        x
    } else if p == T::lit(2.0) {
        x.sqrt()
    } else if p == T::lit(4.0) {
        x.sqrt().sqrt()
    } else {
        x.powf(T::one() / p)
    }
}

pub(crate) fn norm3<T: Real>(v: &[T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn dot3<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
