//! Number types the generic solvers run over.
//!
//! `f64` is used by the solver modules with an absolute tolerance of `1e-9`;
//! `BigRational` is used where equalities have to hold exactly (the linear
//! structure constructions). Comparisons go through [`Scalar::eps`] so that the
//! same code is tolerant in floating point and exact over the rationals.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::{One, Signed, ToPrimitive, Zero};

/// Absolute feasibility tolerance for floating point weights and LP values.
pub const FLOAT_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_usize(n: usize) -> Self;
    fn to_f64(&self) -> f64;
    /// Comparison slack: zero for exact types.
    fn eps() -> Self;

    fn is_zero_tol(&self) -> bool {
        let e = Self::eps();
        *self <= e && *self >= -e
    }
    fn is_pos(&self) -> bool {
        *self > Self::eps()
    }
    fn is_neg(&self) -> bool {
        *self < -Self::eps()
    }
    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
    fn floor_val(&self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_usize(n: usize) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn eps() -> Self {
        FLOAT_TOL
    }
    fn floor_val(&self) -> Self {
        self.floor()
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn eps() -> Self {
        Zero::zero()
    }
    fn is_zero_tol(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn floor_val(&self) -> Self {
        self.floor()
    }
}

/// Shorthand for `a/b` as an exact rational.
pub fn rat(num: i64, den: i64) -> BigRational {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fraction convergents and semiconvergents).
pub fn rationalize(x: f64, max_den: u64) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let negative = x < 0.0;
    let target = x.abs();
    // convergents p/q
    let (mut p0, mut q0, mut p1, mut q1): (u128, u128, u128, u128) = (0, 1, 1, 0);
    let mut frac = target;
    let max_den = max_den as u128;
    loop {
        let a = frac.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den {
            // best semiconvergent within the cap
            let t = (max_den - q0) / q1.max(1);
            let ps = t * p1 + p0;
            let qs = t * q1 + q0;
            if qs > 0 {
                let err_semi = (ps as f64 / qs as f64 - target).abs();
                let err_conv = (p1 as f64 / q1.max(1) as f64 - target).abs();
                if q1 == 0 || err_semi < err_conv {
                    p1 = ps;
                    q1 = qs;
                }
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = frac - a;
        if rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    let q1 = q1.max(1);
    let num = BigInt::from(p1);
    let num = if negative { -num } else { num };
    Ratio::new(num, BigInt::from(q1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.5, 1_000_000), rat(1, 2));
        assert_eq!(rationalize(0.3, 1_000_000), rat(3, 10));
        assert_eq!(rationalize(1.0 / 3.0, 1_000_000), rat(1, 3));
        assert_eq!(rationalize(0.0, 1_000_000), rat(0, 1));
        assert_eq!(rationalize(-0.25, 1_000_000), rat(-1, 4));
    }

    #[test]
    fn rationalize_respects_denominator_cap() {
        let r = rationalize(std::f64::consts::PI, 1000);
        assert!(*r.denom() <= BigInt::from(1000));
        assert_eq!(r, rat(355, 113));
    }

    #[test]
    fn float_tolerance_comparisons() {
        assert!(1e-10f64.is_zero_tol());
        assert!(!1e-8f64.is_zero_tol());
        assert!(!rat(1, 1_000_000_000_000).is_zero_tol());
    }
}
