use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::BigReal;

/// Field operations shared by exact rationals and [`BigReal`], so series
/// recurrences can run in either mode.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Integer `n` in the same representation (and precision) as `self`.
    fn int_like(&self, n: i64) -> Self;
    fn is_zero_value(&self) -> bool;
    fn abs_value(&self) -> Self;
    fn to_f64_value(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.int_like(0)
    }

    fn one_like(&self) -> Self {
        self.int_like(1)
    }
}

impl Scalar for BigRational {
    fn int_like(&self, n: i64) -> Self {
        BigRational::from_integer(n.into())
    }

    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn to_f64_value(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigReal {
    fn int_like(&self, n: i64) -> Self {
        BigReal::from_i64(n, self.prec())
    }

    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn to_f64_value(&self) -> f64 {
        self.to_f64()
    }
}
