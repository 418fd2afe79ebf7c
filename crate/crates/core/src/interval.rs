//! Closed real intervals `[lo, hi]` with outward-rounded arithmetic.

use std::fmt;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::real::{Real, Round};

#[derive(Clone, PartialEq)]
pub struct RealInterval<R> {
    lo: R,
    hi: R,
}

impl<R: Real> RealInterval<R> {
    /// Panics if `lo > hi`.
    pub fn new(lo: R, hi: R) -> Self {
        assert!(lo <= hi, "inverted interval {lo:?} > {hi:?}");
        RealInterval { lo, hi }
    }

    pub fn point(v: R) -> Self {
        RealInterval { lo: v.clone(), hi: v }
    }

    pub fn from_pair((lo, hi): (R, R)) -> Self {
        Self::new(lo, hi)
    }

    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        RealInterval { lo: R::from_int(v, prec, Round::Down), hi: R::from_int(v, prec, Round::Up) }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(v), prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        let (lo, hi) = (R::from_ratio(num, den, prec, Round::Down), R::from_ratio(num, den, prec, Round::Up));
        if lo <= hi {
            RealInterval { lo, hi }
        } else {
            RealInterval { lo: hi, hi: lo }
        }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        RealInterval { lo: R::from_f64(v, prec, Round::Down), hi: R::from_f64(v, prec, Round::Up) }
    }

    pub fn pi(prec: u32) -> Self {
        Self::from_pair(R::pi(prec))
    }

    pub fn e(prec: u32) -> Self {
        Self::from_pair(R::e(prec))
    }

    pub fn ln3(prec: u32) -> Self {
        Self::from_pair(R::ln3(prec))
    }

    pub fn lo(&self) -> &R {
        &self.lo
    }

    pub fn hi(&self) -> &R {
        &self.hi
    }

    pub fn into_bounds(self) -> (R, R) {
        (self.lo, self.hi)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, v: &R) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, o: &Self) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    /// Every point lies strictly inside `(a, b)`.
    pub fn strictly_inside(&self, a: &R, b: &R) -> bool {
        a < &self.lo && &self.hi < b
    }

    /// Certifiably `self > o` at every pair of points.
    pub fn certainly_gt(&self, o: &Self) -> bool {
        self.lo > o.hi
    }

    pub fn certainly_lt(&self, o: &Self) -> bool {
        self.hi < o.lo
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        !(self.certainly_gt(o) || self.certainly_lt(o))
    }

    pub fn is_positive(&self) -> bool {
        self.lo > R::zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&R::zero())
    }

    pub fn width(&self, prec: u32) -> R {
        self.hi.sub(&self.lo, prec, Round::Up)
    }

    pub fn hull(&self, o: &Self) -> Self {
        RealInterval { lo: R::min_of(&self.lo, &o.lo), hi: R::max_of(&self.hi, &o.hi) }
    }

    /// Midpoint (rounded to nearest) and a radius covering the interval.
    pub fn mid_rad(&self, prec: u32) -> (R, R) {
        let mid = self.lo.add(&self.hi, prec, Round::Nearest).mul_pow2(-1);
        let up = self.hi.sub(&mid, prec, Round::Up);
        let down = mid.sub(&self.lo, prec, Round::Up);
        (mid, R::max_of(&up, &down))
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_negative() && !self.hi.is_zero() {
            RealInterval { lo: R::zero(), hi: R::max_of(&self.lo.neg(), &self.hi) }
        } else {
            self.neg()
        }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        RealInterval { lo: self.lo.add(&o.lo, prec, Round::Down), hi: self.hi.add(&o.hi, prec, Round::Up) }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        RealInterval { lo: self.lo.sub(&o.hi, prec, Round::Down), hi: self.hi.sub(&o.lo, prec, Round::Up) }
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        if !a.is_negative() && !c.is_negative() {
            return RealInterval { lo: a.mul(c, prec, Round::Down), hi: b.mul(d, prec, Round::Up) };
        }
        let prods = [(a, c), (a, d), (b, c), (b, d)];
        let mut lo = a.mul(c, prec, Round::Down);
        let mut hi = a.mul(c, prec, Round::Up);
        for (x, y) in &prods[1..] {
            let l = x.mul(y, prec, Round::Down);
            let h = x.mul(y, prec, Round::Up);
            if l < lo {
                lo = l;
            }
            if h > hi {
                hi = h;
            }
        }
        RealInterval { lo, hi }
    }

    pub fn sqr(&self, prec: u32) -> Self {
        let m = self.abs();
        RealInterval { lo: m.lo.mul(&m.lo, prec, Round::Down), hi: m.hi.mul(&m.hi, prec, Round::Up) }
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &Self, prec: u32) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        let quots = [(a, c), (a, d), (b, c), (b, d)];
        let mut lo = a.div(c, prec, Round::Down);
        let mut hi = a.div(c, prec, Round::Up);
        for (x, y) in &quots[1..] {
            let l = x.div(y, prec, Round::Down);
            let h = x.div(y, prec, Round::Up);
            if l < lo {
                lo = l;
            }
            if h > hi {
                hi = h;
            }
        }
        Some(RealInterval { lo, hi })
    }

    pub fn recip(&self, prec: u32) -> Option<Self> {
        Self::from_i64(1, prec).div(self, prec)
    }

    /// Square root of the non-negative part.
    pub fn sqrt(&self, prec: u32) -> Self {
        let lo = if self.lo.is_negative() { R::zero() } else { self.lo.sqrt(prec, Round::Down) };
        let hi = if self.hi.is_negative() { R::zero() } else { self.hi.sqrt(prec, Round::Up) };
        RealInterval { lo, hi }
    }

    /// `n`-th root of a non-negative interval.
    pub fn root(&self, n: u32, prec: u32) -> Self {
        assert!(!self.lo.is_negative(), "root of an interval reaching below zero");
        RealInterval { lo: self.lo.root(n, prec, Round::Down), hi: self.hi.root(n, prec, Round::Up) }
    }

    /// Integer power by repeated squaring.
    pub fn pow_u(&self, n: u32, prec: u32) -> Self {
        let mut result = Self::from_i64(1, prec);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, prec);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr(prec);
            }
        }
        result
    }

    pub fn mul_pow2(&self, e: i32) -> Self {
        RealInterval { lo: self.lo.mul_pow2(e), hi: self.hi.mul_pow2(e) }
    }

    pub fn max(&self, o: &Self) -> Self {
        RealInterval { lo: R::max_of(&self.lo, &o.lo), hi: R::max_of(&self.hi, &o.hi) }
    }

    pub fn min(&self, o: &Self) -> Self {
        RealInterval { lo: R::min_of(&self.lo, &o.lo), hi: R::min_of(&self.hi, &o.hi) }
    }

    /// Decimal rendering with outward rounding.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (self.lo.to_mp().to_sci(digits, Round::Down), self.hi.to_mp().to_sci(digits, Round::Up))
    }
}

impl<R: Real> fmt::Debug for RealInterval<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal(f.precision().unwrap_or(17));
        write!(f, "[{lo}, {hi}]")
    }
}

impl<R: Real> Serialize for RealInterval<R> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (lo, hi) = self.to_decimal(20);
        [lo, hi].serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MpFloat;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type I = RealInterval<MpFloat>;

    fn iv(a: f64, b: f64) -> I {
        I::new(MpFloat::from_f64(a.min(b)), MpFloat::from_f64(a.max(b)))
    }

    fn q(v: &MpFloat) -> BigRational {
        v.to_rational()
    }

    fn inside(x: &BigRational, i: &I) -> bool {
        q(i.lo()) <= *x && *x <= q(i.hi())
    }

    #[test]
    fn abs_of_straddling_interval() {
        let a = iv(-3.0, 2.0).abs();
        assert_eq!(a.lo(), &MpFloat::zero());
        assert_eq!(a.hi(), &MpFloat::from_i64(3));
    }

    #[test]
    fn division_by_zero_interval_refused() {
        assert!(iv(1.0, 2.0).div(&iv(-1.0, 1.0), 64).is_none());
    }

    #[test]
    fn mid_rad_covers() {
        let i = iv(1.0, 1.5);
        let (m, r) = i.mid_rad(64);
        assert_eq!(m, MpFloat::from_f64(1.25));
        assert_eq!(r, MpFloat::from_f64(0.25));
    }

    proptest! {
        #[test]
        fn ops_enclose_pointwise(a in -100.0f64..100.0, b in -100.0f64..100.0,
                                 c in -100.0f64..100.0, d in -100.0f64..100.0,
                                 s in 0.0f64..1.0, t in 0.0f64..1.0, prec in 8u32..80) {
            let x = iv(a, b);
            let y = iv(c, d);
            // Sample points inside both intervals.
            let px = q(x.lo()) + (q(x.hi()) - q(x.lo())) * q(&MpFloat::from_f64(s));
            let py = q(y.lo()) + (q(y.hi()) - q(y.lo())) * q(&MpFloat::from_f64(t));
            prop_assert!(inside(&(&px + &py), &x.add(&y, prec)));
            prop_assert!(inside(&(&px - &py), &x.sub(&y, prec)));
            prop_assert!(inside(&(&px * &py), &x.mul(&y, prec)));
            prop_assert!(inside(&(&px * &px), &x.sqr(prec)));
            prop_assert!(inside(&(&px * &px * &px), &x.pow_u(3, prec)));
            if let Some(qv) = x.div(&y, prec) {
                prop_assert!(inside(&(&px / &py), &qv));
            }
        }
    }
}
