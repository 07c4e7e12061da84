//! Integer scalar abstraction for the polynomial layer.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact signed integer type usable as a polynomial coefficient.
///
/// Implemented for every type with the listed capabilities, in particular
/// `i64`, `i128` and `num_bigint::BigInt`. Fixed-width types are fine for
/// small experiments; anything that evaluates polynomials at large
/// arguments should use `BigInt` (see [`crate::Int`]).
pub trait Scalar:
    Clone + Debug + Display + Hash + Ord + Integer + Signed + FromPrimitive + ToPrimitive
{
    fn from_u64_exact(v: u64) -> Option<Self> {
        <Self as FromPrimitive>::from_u64(v)
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + Hash + Ord + Integer + Signed + FromPrimitive + ToPrimitive
{
}

/// Non-negative gcd.
pub fn gcd<T: Scalar>(a: &T, b: &T) -> T {
    a.gcd(b)
}

/// `base^exp` by repeated squaring.
pub fn pow<T: Scalar>(base: &T, mut exp: u32) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}
