//! Monic integer cubics: discriminant, rationality test, Sturm-sequence root
//! isolation and bisection refinement of the isolating intervals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::interval::{dyadic, RationalInterval};

/// `x³ + a·x² + b·x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubicPoly {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl CubicPoly {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    /// `18abc − 4a³c + a²b² − 4b³ − 27c²`.
    pub fn discriminant(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        18 * a * b * c - 4 * a * a * a * c + a * a * b * b - 4 * b * b * b - 27 * c * c
    }

    /// Exact value at an integer point.
    pub fn eval_int(&self, x: i128) -> i128 {
        ((x + self.a as i128) * x + self.b as i128) * x + self.c as i128
    }

    /// Monic integer cubics have rational roots only among the divisors of `c`.
    pub fn rational_root(&self) -> Option<i64> {
        if self.c == 0 {
            return Some(0);
        }
        let c = self.c.unsigned_abs();
        let mut d: u64 = 1;
        while d.saturating_mul(d) <= c {
            if c % d == 0 {
                for cand in [d, c / d] {
                    for s in [1i128, -1] {
                        let x = s * cand as i128;
                        if self.eval_int(x) == 0 {
                            return Some(x as i64);
                        }
                    }
                }
            }
            d += 1;
        }
        None
    }

    pub fn is_irreducible(&self) -> bool {
        self.rational_root().is_none()
    }

    /// Sign of `p(n / 2^k)`, computed exactly.
    pub fn sign_at_dyadic(&self, n: &BigInt, k: u32) -> Ordering {
        let s = BigInt::one() << k as usize;
        let v = ((n + BigInt::from(self.a) * &s) * n + BigInt::from(self.b) * &s * &s) * n
            + BigInt::from(self.c) * &s * &s * &s;
        v.sign_cmp()
    }

    /// Isolates the three real roots, largest first. Requires a positive
    /// discriminant and an irreducible polynomial (no rational roots, so no
    /// dyadic endpoint can ever be a root).
    pub fn isolate_roots(&self) -> Vec<RootInterval> {
        let sturm = SturmChain::new(self);
        let bound = 1 + self.a.unsigned_abs().max(self.b.unsigned_abs()).max(self.c.unsigned_abs());
        let mut stack = vec![(BigInt::from(-(bound as i128)), BigInt::from(bound), 0u32)];
        let mut found = Vec::new();
        while let Some((lo, hi, k)) = stack.pop() {
            let count = sturm.variations(&dyadic(&lo, k)) - sturm.variations(&dyadic(&hi, k));
            match count {
                0 => {}
                1 => found.push(self.narrow(lo, hi, k)),
                _ => {
                    let mid = &lo + &hi;
                    stack.push((lo * 2, mid.clone(), k + 1));
                    stack.push((mid, hi * 2, k + 1));
                }
            }
        }
        found.sort_by(|x, y| y.cmp_position(x));
        found
    }

    /// Shrinks an isolating `(lo, hi)` at scale `k` to unit width at that scale.
    fn narrow(&self, mut lo: BigInt, mut hi: BigInt, k: u32) -> RootInterval {
        let lo_sign = self.sign_at_dyadic(&lo, k);
        while &hi - &lo > BigInt::one() {
            let mid = (&lo + &hi).div_floor(&BigInt::from(2));
            if self.sign_at_dyadic(&mid, k) == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        RootInterval {
            poly: *self,
            lo,
            prec: k,
            lo_sign,
        }
    }
}

impl fmt::Display for CubicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^3")?;
        for (coef, mono) in [(self.a, "x^2"), (self.b, "x"), (self.c, "")] {
            if coef == 0 {
                continue;
            }
            let sign = if coef < 0 { '-' } else { '+' };
            let mag = coef.unsigned_abs();
            if mag == 1 && !mono.is_empty() {
                write!(f, " {sign} {mono}")?;
            } else {
                write!(f, " {sign} {mag}{mono}")?;
            }
        }
        Ok(())
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

/// Sturm chain `p, p', −rem(p, p'), −rem(p', ·)` with rational coefficients,
/// stored lowest degree first.
struct SturmChain {
    polys: Vec<Vec<BigRational>>,
}

impl SturmChain {
    fn new(p: &CubicPoly) -> Self {
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        let p0 = vec![q(p.c), q(p.b), q(p.a), q(1)];
        let p1 = vec![q(p.b), q(2 * p.a), q(3)];
        let mut polys = vec![p0, p1];
        loop {
            let n = polys.len();
            let r = poly_rem(&polys[n - 2], &polys[n - 1]);
            if r.is_empty() {
                break;
            }
            let neg: Vec<BigRational> = r.into_iter().map(|c| -c).collect();
            let done = neg.len() == 1;
            polys.push(neg);
            if done {
                break;
            }
        }
        Self { polys }
    }

    fn variations(&self, x: &BigRational) -> i32 {
        let mut count = 0;
        let mut last: Option<bool> = None;
        for p in &self.polys {
            let mut v = BigRational::zero();
            for c in p.iter().rev() {
                v = v * x + c;
            }
            if v.is_zero() {
                continue;
            }
            let positive = v.is_positive();
            if let Some(prev) = last {
                if prev != positive {
                    count += 1;
                }
            }
            last = Some(positive);
        }
        count
    }
}

/// Remainder of polynomial division, trailing zeros stripped.
fn poly_rem(num: &[BigRational], den: &[BigRational]) -> Vec<BigRational> {
    let mut r = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1].clone();
    while r.len() >= dl {
        let coef = r[r.len() - 1].clone() / &lead;
        let shift = r.len() - dl;
        for (i, d) in den.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &coef * d;
        }
        r.pop();
    }
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    r
}

/// Isolating interval `(lo/2^prec, (lo+1)/2^prec)` for one real root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    poly: CubicPoly,
    lo: BigInt,
    prec: u32,
    lo_sign: Ordering,
}

impl RootInterval {
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Numerator of the lower endpoint at scale `2^precision`.
    pub fn lower_numerator(&self) -> &BigInt {
        &self.lo
    }

    /// Refines by bisection until the width is `2^-prec`; never coarsens.
    pub fn refined(&self, prec: u32) -> RootInterval {
        let mut out = self.clone();
        while out.prec < prec {
            let mid = &out.lo * 2 + 1;
            let s = out.poly.sign_at_dyadic(&mid, out.prec + 1);
            out.lo = if s == out.lo_sign { mid } else { &out.lo * 2 };
            out.prec += 1;
        }
        out
    }

    /// The enclosing grid interval at `prec` bits, refining or coarsening as
    /// needed. Coarsening is outward, so the result always contains `self`.
    pub fn at_precision(&self, prec: u32) -> RootInterval {
        match prec.cmp(&self.prec) {
            Ordering::Greater => self.refined(prec),
            Ordering::Equal => self.clone(),
            Ordering::Less => {
                let lo = self.lo.div_floor(&(BigInt::one() << (self.prec - prec) as usize));
                let lo_sign = self.poly.sign_at_dyadic(&lo, prec);
                RootInterval {
                    poly: self.poly,
                    lo,
                    prec,
                    lo_sign,
                }
            }
        }
    }

    pub fn as_interval(&self) -> RationalInterval {
        RationalInterval::new(dyadic(&self.lo, self.prec), dyadic(&(&self.lo + 1), self.prec))
    }

    pub fn mid_f64(&self) -> f64 {
        let mid = dyadic(&(&self.lo * 2 + 1), self.prec + 1);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    fn cmp_position(&self, other: &RootInterval) -> Ordering {
        let p = self.prec.max(other.prec);
        let a = &self.lo << (p - self.prec) as usize;
        let b = &other.lo << (p - other.prec) as usize;
        a.cmp(&b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_values() {
        assert_eq!(CubicPoly::new(2, -3, -1).discriminant(), 257);
        assert_eq!(CubicPoly::new(0, -1, 0).discriminant(), 4);
        assert_eq!(CubicPoly::new(-1, -2, 1).discriminant(), 49);
        assert_eq!(CubicPoly::new(0, 0, -2).discriminant(), -108);
    }

    #[test]
    fn rational_roots() {
        assert_eq!(CubicPoly::new(0, -1, 0).rational_root(), Some(0));
        assert_eq!(CubicPoly::new(-6, 11, -6).rational_root().map(|r| r > 0), Some(true));
        assert!(CubicPoly::new(2, -3, -1).is_irreducible());
        assert!(CubicPoly::new(0, -3, 1).is_irreducible());
    }

    #[test]
    fn isolates_k257_roots_in_decreasing_order() {
        let p = CubicPoly::new(2, -3, -1);
        let roots = p.isolate_roots();
        assert_eq!(roots.len(), 3);
        let mids: Vec<f64> = roots.iter().map(|r| r.refined(60).mid_f64()).collect();
        // numpy.roots([1, 2, -3, -1])
        let expected = [1.198691243515997, -0.2864620650316005, -2.9122291784843943];
        for (m, e) in mids.iter().zip(expected) {
            assert!((m - e).abs() < 1e-14, "{m} vs {e}");
        }
    }

    #[test]
    fn refinement_is_nested() {
        let p = CubicPoly::new(-1, -2, 1);
        for r in p.isolate_roots() {
            let coarse = r.refined(20);
            let fine = coarse.refined(90);
            assert!(fine.as_interval().is_subset_of(&coarse.as_interval()));
            assert!(coarse.at_precision(10).as_interval().contains(&fine.as_interval().midpoint()));
            assert!(fine.as_interval().width_at_most_pow2(90));
        }
    }

    #[test]
    fn displays_polynomial() {
        assert_eq!(CubicPoly::new(2, -3, -1).to_string(), "x^3 + 2x^2 - 3x - 1");
        assert_eq!(CubicPoly::new(0, -1, 0).to_string(), "x^3 - x");
    }
}
