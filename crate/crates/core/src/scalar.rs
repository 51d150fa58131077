//! Exact field scalars.
//!
//! Every engine in this crate is generic over [`Scalar`], a thin layer on
//! top of `num-traits` that adds the handful of things exact linear algebra
//! and the `"p/q"` wire format need. Rational types from `num-rational` are
//! the intended instantiations; [`crate::Q`] fixes the arbitrary-precision
//! one.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, NumAssign, Signed};
pub use num_traits::{One, Zero};

/// An exact field element.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn int(v: i64) -> Self;

    fn frac(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }

    /// Lowest-terms `"p/q"` with `q > 0`; the denominator is always written.
    fn to_pq(&self) -> String;

    fn parse_pq(s: &str) -> Option<Self>;

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.clone() + other.clone();
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        *self = self.clone() - other.clone();
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone
        + Integer
        + NumAssign
        + Signed
        + Hash
        + Debug
        + Display
        + FromPrimitive
        + FromStr
        + Send
        + Sync
        + 'static,
{
    fn int(v: i64) -> Self {
        Ratio::from_integer(T::from_i64(v).expect("integer out of range for scalar"))
    }

    fn to_pq(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_pq(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p = p.trim().parse::<T>().ok()?;
                let q = q.trim().parse::<T>().ok()?;
                if q.is_zero() {
                    return None;
                }
                Some(Ratio::new(p, q))
            }
            None => s.parse::<T>().ok().map(Ratio::from_integer),
        }
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
}

/// `k!` as a scalar.
pub fn factorial<F: Scalar>(k: usize) -> F {
    (1..=k as i64).fold(F::one(), |acc, i| acc * F::int(i))
}
