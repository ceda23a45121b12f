//! Interval arithmetic with outward rounding.
//!
//! Endpoints are nudged one ulp outward after every rounded operation, so no
//! floating-point rounding mode is ever switched: the arithmetic is safe
//! under concurrent use from any number of threads. The contract is
//! containment, not tightness.

use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::Error;

/// Closed interval `[lo, hi]` with finite endpoints.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[inline]
fn down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi, "bad interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    pub const ZERO: Self = Self { lo: 0.0, hi: 0.0 };
    pub const ONE: Self = Self { lo: 1.0, hi: 1.0 };

    pub fn width(self) -> f64 {
        up(self.hi - self.lo)
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    pub fn subset_of(self, other: Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(self, other: Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(self, other: Self) -> Self {
        Self { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Upper bound on `|x|` over the interval. Exact (abs and max of floats
    /// need no rounding).
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Enclosure of `{|x| : x in self}`.
    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Self { lo: -self.hi, hi: -self.lo }
        } else {
            Self { lo: 0.0, hi: self.mag() }
        }
    }

    /// Symmetric widening by `r >= 0`, outward rounded.
    pub fn widen(self, r: f64) -> Self {
        assert!(r >= 0.0);
        Self { lo: down(self.lo - r), hi: up(self.hi + r) }
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, Error> {
        if rhs.contains_zero() {
            return Err(Error::IntervalDivByZero);
        }
        let c = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        Ok(Self { lo: down(min4(c)), hi: up(max4(c)) })
    }

    /// Integer power by repeated multiplication (sound, not tight).
    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

#[inline]
fn min4(c: [f64; 4]) -> f64 {
    c[0].min(c[1]).min(c[2]).min(c[3])
}

#[inline]
fn max4(c: [f64; 4]) -> f64 {
    c[0].max(c[1]).max(c[2]).max(c[3])
}

impl Add for Interval {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { lo: down(self.lo + rhs.lo), hi: up(self.hi + rhs.hi) }
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { lo: down(self.lo - rhs.hi), hi: up(self.hi - rhs.lo) }
    }
}

impl Mul for Interval {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let c = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        Self { lo: down(min4(c)), hi: up(max4(c)) }
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        // Negation of endpoints is exact.
        Self { lo: -self.hi, hi: -self.lo }
    }
}

/// Panics when the divisor contains zero; use [`Interval::checked_div`] to
/// handle that case.
impl Div for Interval {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(rhs).expect("interval division by interval containing zero")
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_contains_exact_result() {
        let s = Interval::new(1.0, 2.0) + Interval::new(3.0, 4.0);
        assert!(s.lo <= 4.0 && 6.0 <= s.hi);
        assert!(s.width() < 6.0 + 1e-14);
    }

    #[test]
    fn mul_mixed_signs() {
        let p = Interval::new(1.0, 2.0) * Interval::new(-1.0, 1.0);
        assert!(p.lo <= -2.0 && 2.0 <= p.hi);
        assert!(p.subset_of(Interval::new(-2.0 - 1e-12, 2.0 + 1e-12)));
    }

    #[test]
    fn mag_examples() {
        assert_eq!(Interval::new(-3.0, 2.0).mag(), 3.0);
        assert_eq!(Interval::ZERO.mag(), 0.0);
    }

    #[test]
    fn div_by_zero_interval_errors() {
        let e = Interval::ONE.checked_div(Interval::new(-1.0, 1.0));
        assert!(matches!(e, Err(Error::IntervalDivByZero)));
    }

    #[test]
    fn inclusion_isotonicity() {
        let x = Interval::new(0.25, 0.5);
        let xp = Interval::new(0.2, 0.6);
        let y = Interval::new(-2.0, -1.0);
        let yp = Interval::new(-2.5, -0.5);
        assert!((x * y).subset_of(xp * yp));
        assert!((x + y).subset_of(xp + yp));
        assert!((x - y).subset_of(xp - yp));
        assert!((x / y).subset_of(xp / yp));
    }

    #[test]
    fn degenerate_ops_contain_float_result() {
        let a = 0.1_f64;
        let b = 0.3_f64;
        assert!((Interval::point(a) + Interval::point(b)).contains(a + b));
        assert!((Interval::point(a) * Interval::point(b)).contains(a * b));
        assert!((Interval::point(a) / Interval::point(b)).contains(a / b));
        assert!((Interval::point(a) - Interval::point(b)).contains(a - b));
    }
}
