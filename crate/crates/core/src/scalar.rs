//! Scalar abstraction for exact cost arithmetic.
//!
//! Every cost, allocation and LP coefficient in this crate is generic over
//! [`Scalar`]. The `Ord` bound rules out IEEE floats; the intended
//! instantiations are exact rationals such as [`Rat`](crate::Rat) (arbitrary
//! precision) or `Ratio<i64>` when inputs are known to stay small.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use std::fmt::{Debug, Display};

/// An exact, totally ordered field scalar.
///
/// Division is assumed exact (`(a / b) * b == a` for nonzero `b`), which is
/// what makes tolerance-free core checks possible.
pub trait Scalar:
    Num + Signed + Ord + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync
{
}

impl<T> Scalar for T where
    T: Num + Signed + Ord + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync
{
}

/// Converts a demand count into the scalar domain.
///
/// Panics only when the scalar type cannot represent the count, which cannot
/// happen for arbitrary-precision rationals.
pub fn from_count<R: Scalar>(v: u64) -> R {
    R::from_u64(v).expect("count not representable in scalar type")
}

/// True when `x` is a nonnegative integer, i.e. round-trips through `u64`.
pub fn is_nonneg_integer<R: Scalar>(x: &R) -> bool {
    match x.to_u64() {
        Some(v) => from_count::<R>(v) == *x,
        None => false,
    }
}

/// Builds a rational from a numerator/denominator pair of machine integers.
pub fn rat(numer: i64, denom: i64) -> crate::Rat {
    assert!(denom != 0, "zero denominator");
    crate::Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integral rational.
pub fn int(value: i64) -> crate::Rat {
    crate::Rat::from_integer(BigInt::from(value))
}
