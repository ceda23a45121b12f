//! Scalar abstraction so every coefficient-space formula is written once and
//! instantiated with plain floats (numerics) or [`Interval`] (validation).

use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use crate::interval::Interval;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;

    /// Enclosure of the absolute value.
    fn abs_bound(self) -> Self;

    /// Upper bound on `|self|` as a float.
    fn mag(self) -> f64;

    /// Midpoint (the value itself for floats).
    fn mid(self) -> f64;

    /// Division. The divisor must be bounded away from zero; panics for an
    /// interval straddling zero.
    fn div(self, rhs: Self) -> Self;

    /// Upper join: an enclosure of `max(x, y)` over both arguments. Used to
    /// take suprema over finitely many candidates.
    fn max_with(self, rhs: Self) -> Self;

    fn is_zero(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn abs_bound(self) -> Self {
        self.abs()
    }
    fn mag(self) -> f64 {
        self.abs()
    }
    fn mid(self) -> f64 {
        self
    }
    fn div(self, rhs: Self) -> Self {
        self / rhs
    }
    fn max_with(self, rhs: Self) -> Self {
        self.max(rhs)
    }
    fn is_zero(self) -> bool {
        self == 0.0
    }
}

impl Scalar for Interval {
    fn zero() -> Self {
        Interval::ZERO
    }
    fn one() -> Self {
        Interval::ONE
    }
    fn from_f64(v: f64) -> Self {
        Interval::point(v)
    }
    fn abs_bound(self) -> Self {
        self.abs()
    }
    fn mag(self) -> f64 {
        Interval::mag(self)
    }
    fn mid(self) -> f64 {
        Interval::mid(self)
    }
    fn div(self, rhs: Self) -> Self {
        self / rhs
    }
    fn max_with(self, rhs: Self) -> Self {
        Interval { lo: self.lo.max(rhs.lo), hi: self.hi.max(rhs.hi) }
    }
    fn is_zero(self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }
}
