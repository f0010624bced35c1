//! Numeric backends: `f64` for data work and `BigRational` for exact checks.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic needed by moments, functionals and estimators.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(r: &BigRational) -> Self;
    /// `None` when the value cannot be represented (non-finite input).
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    /// Square root, `None` for negative input or when not exactly representable.
    fn sqrt(&self) -> Option<Self>;
    /// Real power, `None` when undefined or not exactly representable.
    fn powf(&self, q: f64) -> Option<Self>;
    /// Whether arithmetic is exact (no rounding).
    fn is_exact() -> bool;

    /// True when `self` is zero up to the rounding noise of values of size `scale`.
    fn negligible(&self, scale: &Self) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            let tol = 64.0 * f64::EPSILON;
            self.to_f64().abs() <= tol * tol * scale.to_f64().abs()
        }
    }

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    fn powi(&self, e: i32) -> Self {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| libm::sqrt(*self))
    }
    fn powf(&self, q: f64) -> Option<Self> {
        let v = libm::pow(*self, q);
        v.is_finite().then_some(v)
    }
    fn is_exact() -> bool {
        false
    }
}

fn exact_sqrt(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let s = v.sqrt();
    (&s * &s == *v).then_some(s)
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sqrt(&self) -> Option<Self> {
        let n = exact_sqrt(self.numer())?;
        let d = exact_sqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }
    fn powf(&self, q: f64) -> Option<Self> {
        if !q.is_finite() {
            return None;
        }
        let twice = q * 2.0;
        if twice != libm::trunc(twice) || libm::fabs(twice) > i32::MAX as f64 {
            return None;
        }
        let twice = twice as i32;
        let base = if twice % 2 == 0 { self.clone() } else { Scalar::sqrt(self)? };
        let e = if twice % 2 == 0 { twice / 2 } else { twice };
        if e < 0 && Zero::is_zero(&base) {
            return None;
        }
        Some(Scalar::powi(&base, e))
    }
    fn is_exact() -> bool {
        true
    }
}

/// Generalised binomial coefficient C(q, k) for a rational q.
pub fn binomial_ratio(q: &BigRational, k: usize) -> BigRational {
    let mut acc = <BigRational as One>::one();
    for l in 0..k {
        acc = acc * (q - BigRational::from_integer(BigInt::from(l)))
            / BigRational::from_integer(BigInt::from(l + 1));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_sqrt_is_exact_or_none() {
        assert_eq!(Scalar::sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(Scalar::sqrt(&q(2, 1)), None);
        assert_eq!(Scalar::sqrt(&q(-1, 1)), None);
    }

    #[test]
    fn rational_powf_half_integers() {
        assert_eq!(q(4, 9).powf(1.5), Some(q(8, 27)));
        assert_eq!(q(4, 9).powf(-2.0), Some(q(81, 16)));
        assert_eq!(q(2, 1).powf(0.25), None);
        assert_eq!(q(0, 1).powf(-1.0), None);
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        assert_eq!(Scalar::powi(&3.0f64, 5), 243.0);
        assert_eq!(Scalar::powi(&2.0f64, -3), 0.125);
        assert_eq!(Scalar::powi(&q(2, 3), 3), q(8, 27));
    }

    #[test]
    fn binomial_of_half() {
        assert_eq!(binomial_ratio(&q(1, 2), 2), q(-1, 8));
        assert_eq!(binomial_ratio(&q(5, 1), 2), q(10, 1));
    }

    #[test]
    fn negligible_scales_with_magnitude() {
        assert!(1e-31f64.negligible(&25.0));
        assert!(!1e-20f64.negligible(&1e-20));
        assert!(!q(1, 1000).negligible(&q(1, 1)));
    }
}
