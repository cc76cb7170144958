//! Scalar abstractions.
//!
//! Geometry, measures and the sparsification game only need an ordered field,
//! so they are written against [`Scalar`] and run unchanged on `f64`, `f32`
//! or exact rationals. Spectral and operator code needs square roots and
//! eigensolvers and asks for [`Real`] instead.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

/// An ordered field element usable as a distance, weight or payoff.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// Slack used for metric-axiom checks and certificate comparisons.
    fn tolerance() -> Self;

    /// Pivot threshold for the simplex solver.
    fn pivot_tolerance() -> Self;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn tolerance() -> Self {
        1e-9
    }
    fn pivot_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn tolerance() -> Self {
        1e-4
    }
    fn pivot_tolerance() -> Self {
        1e-6
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn tolerance() -> Self {
        Self::zero()
    }
    fn pivot_tolerance() -> Self {
        Self::zero()
    }
}

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;
    fn tolerance() -> Self {
        Self::zero()
    }
    fn pivot_tolerance() -> Self {
        Self::zero()
    }
}

/// Floating point scalars with a full linear-algebra toolbox.
pub trait Real: Scalar + nalgebra::RealField + Copy {}

impl Real for f64 {}
impl Real for f32 {}

/// Converts an `f64` literal or measured value into `S`.
///
/// Exact types receive the exact binary value of `x`.
pub fn cast<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("finite value representable in scalar type")
}

pub fn from_usize<S: Scalar>(x: usize) -> S {
    S::from_usize(x).expect("integer representable in scalar type")
}

/// Lossy conversion used for reporting.
pub fn to_f64<S: Scalar>(x: &S) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Neumaier-compensated sum. Exact types pass through unchanged.
pub fn compensated_sum<'a, S: Scalar, I>(items: I) -> S
where
    I: IntoIterator<Item = &'a S>,
{
    let mut sum = S::zero();
    let mut carry = S::zero();
    for x in items {
        let t = sum.clone() + x.clone();
        if S::EXACT {
            sum = t;
            continue;
        }
        if sum.abs_val() >= x.abs_val() {
            carry = carry + ((sum - t.clone()) + x.clone());
        } else {
            carry = carry + ((x.clone() - t.clone()) + sum);
        }
        sum = t;
    }
    sum + carry
}

/// Exact rational from a ratio of integers.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
