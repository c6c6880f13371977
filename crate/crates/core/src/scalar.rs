//! Scalar abstractions.
//!
//! Floating-point kernels (SDP, Walsh transform, state simulation) are written
//! against [`Real`], implemented for `f32` and `f64`. The simplex solver is
//! written against [`LpScalar`], implemented for `f64` and exact
//! [`BigRational`].

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::RealField;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp + Send + Sync + 'static
{
    /// Machine epsilon of the type.
    fn eps() -> Self;
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal fits scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Ordered field used by the dense simplex tableau.
pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Threshold below which a magnitude counts as zero (zero for exact types).
    fn tolerance() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
    /// `true` when the scalar type is exact.
    fn is_exact() -> bool;

    fn is_positive_tol(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_negative_tol(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn is_zero_tol(&self) -> bool {
        !self.is_positive_tol() && !self.is_negative_tol()
    }

    /// Flushes round-off residue to zero (no-op for exact types).
    fn snap(&mut self) {}
}

impl LpScalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_exact() -> bool {
        false
    }
    fn snap(&mut self) {
        if self.abs() < 1e-13 {
            *self = 0.0;
        }
    }
}

impl LpScalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_exact() -> bool {
        true
    }
}
