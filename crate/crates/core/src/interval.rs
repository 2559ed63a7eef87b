//! Closed intervals with exact rational endpoints.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    /// Builds `[lo, hi]`; the endpoints are swapped if given out of order.
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self { lo: hi, hi: lo }
        }
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn from_integer(n: i128) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    /// `+1` or `-1` when the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn is_subset_of(&self, other: &RationalInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// True when the width is at most `2^-bits`.
    pub fn width_at_most_pow2(&self, bits: u32) -> bool {
        let scaled = self.width() * BigRational::from_integer(BigInt::one() << bits as usize);
        scaled <= BigRational::one()
    }

    /// Largest absolute value attained on the interval.
    pub fn magnitude(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// Interval quotient; `None` when the divisor contains zero.
    pub fn checked_div(&self, rhs: &RationalInterval) -> Option<RationalInterval> {
        if rhs.contains_zero() {
            return None;
        }
        let inv = RationalInterval::new(rhs.hi.recip(), rhs.lo.recip());
        Some(self * &inv)
    }

    pub fn scale(&self, k: &BigRational) -> RationalInterval {
        RationalInterval::new(&self.lo * k, &self.hi * k)
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo_f64(), self.hi_f64())
    }
}

impl Add for &RationalInterval {
    type Output = RationalInterval;
    fn add(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &RationalInterval {
    type Output = RationalInterval;
    fn sub(self, rhs: &RationalInterval) -> RationalInterval {
        RationalInterval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Neg for &RationalInterval {
    type Output = RationalInterval;
    fn neg(self) -> RationalInterval {
        RationalInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Mul for &RationalInterval {
    type Output = RationalInterval;
    fn mul(self, rhs: &RationalInterval) -> RationalInterval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        RationalInterval { lo, hi }
    }
}

/// `n / 2^k` as an exact rational.
pub fn dyadic(n: &BigInt, k: u32) -> BigRational {
    BigRational::new(n.clone(), BigInt::one() << k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn arithmetic_encloses_pointwise_results() {
        let a = RationalInterval::new(q(-1, 2), q(3, 4));
        let b = RationalInterval::new(q(2, 1), q(5, 2));
        let p = &a * &b;
        assert_eq!(p.lo(), &q(-5, 4));
        assert_eq!(p.hi(), &q(15, 8));
        let d = a.checked_div(&b).unwrap();
        assert!(d.contains(&q(-1, 4)) && d.contains(&q(3, 8)));
        assert!(b.checked_div(&a).is_none());
        assert_eq!((&a - &a).lo(), &q(-5, 4));
    }

    #[test]
    fn width_test_is_exact() {
        let i = RationalInterval::new(q(0, 1), q(1, 1024));
        assert!(i.width_at_most_pow2(10));
        assert!(!i.width_at_most_pow2(11));
        assert_eq!(i.sign(), None);
        assert_eq!(RationalInterval::new(q(1, 3), q(1, 2)).sign(), Some(1));
    }
}
