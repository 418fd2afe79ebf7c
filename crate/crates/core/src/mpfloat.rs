//! Arbitrary-precision binary floating point with directed rounding.
//!
//! A value is `man * 2^exp` with an odd (or zero) mantissa, so equal values
//! have equal representations. There are no infinities or NaNs: every
//! operation either produces a finite value or panics on a violated
//! precondition (division by zero, square root of a negative number).
//!
//! Each operation takes the target precision in bits and a [`Round`]
//! direction and returns the exactly rounded result of the exact operation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::real::Round;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MpFloat {
    man: BigInt,
    exp: i64,
}

impl MpFloat {
    pub fn zero() -> Self {
        MpFloat { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        MpFloat { man: BigInt::one(), exp: 0 }
    }

    /// Exact value `man * 2^exp`, normalized.
    pub fn from_parts(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        MpFloat { man: man >> tz, exp: exp + tz as i64 }
    }

    /// Exact conversion of a finite binary64 value.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "MpFloat::from_f64 of non-finite value");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 { (frac, -1074) } else { (frac | (1u64 << 52), biased - 1075) };
        let m = BigInt::from(m);
        Self::from_parts(if neg { -m } else { m }, e)
    }

    pub fn from_int(v: &BigInt, prec: u32, rnd: Round) -> Self {
        round_signed(v.clone(), 0, prec, rnd)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_parts(BigInt::from(v), 0)
    }

    /// `num / den` rounded to `prec` bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, rnd: Round) -> Self {
        assert!(!den.is_zero(), "MpFloat::from_ratio with zero denominator");
        div_parts(num, 0, den, 0, prec, rnd)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Position just above the most significant bit: `|x| < 2^top`.
    fn top(&self) -> i64 {
        self.exp + self.man.bits() as i64
    }

    /// `floor(log2 |x|) + 1`, or `None` for zero.
    pub fn magnitude(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.top())
    }

    pub fn neg(&self) -> Self {
        MpFloat { man: -&self.man, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        MpFloat { man: self.man.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        MpFloat { man: self.man.clone(), exp: self.exp + e }
    }

    pub fn round(&self, prec: u32, rnd: Round) -> Self {
        round_signed(self.man.clone(), self.exp, prec, rnd)
    }

    pub fn add(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        if rhs.is_zero() {
            return self.round(prec, rnd);
        }
        if self.is_zero() {
            return rhs.round(prec, rnd);
        }
        let (big, small) = if self.top() >= rhs.top() { (self, rhs) } else { (rhs, self) };
        // Anything strictly below half a unit of the lowest bit that can
        // influence rounding acts only as a sticky bit.
        let low = big.exp.min(big.top() - prec as i64 - 2);
        let small = if small.top() < low {
            let s = if small.is_negative() { -1 } else { 1 };
            MpFloat { man: BigInt::from(s), exp: low - 2 }
        } else {
            small.clone()
        };
        let e = big.exp.min(small.exp);
        let sum = (&big.man << (big.exp - e) as usize) + (&small.man << (small.exp - e) as usize);
        round_signed(sum, e, prec, rnd)
    }

    pub fn sub(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        self.add(&rhs.neg(), prec, rnd)
    }

    pub fn mul(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        round_signed(&self.man * &rhs.man, self.exp + rhs.exp, prec, rnd)
    }

    /// Exact product.
    pub fn mul_exact(&self, rhs: &Self) -> Self {
        Self::from_parts(&self.man * &rhs.man, self.exp + rhs.exp)
    }

    /// Exact sum.
    pub fn add_exact(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let sum = (&self.man << (self.exp - e) as usize) + (&rhs.man << (rhs.exp - e) as usize);
        Self::from_parts(sum, e)
    }

    pub fn div(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        assert!(!rhs.is_zero(), "MpFloat division by zero");
        div_parts(&self.man, self.exp, &rhs.man, rhs.exp, prec, rnd)
    }

    pub fn sqrt(&self, prec: u32, rnd: Round) -> Self {
        self.root(2, prec, rnd)
    }

    /// `n`-th root of a non-negative value.
    pub fn root(&self, n: u32, prec: u32, rnd: Round) -> Self {
        assert!(n >= 1);
        assert!(!self.is_negative(), "MpFloat root of a negative value");
        if self.is_zero() {
            return Self::zero();
        }
        if n == 1 {
            return self.round(prec, rnd);
        }
        let n64 = n as i64;
        let m = self.man.magnitude();
        let want = n64 * (prec as i64 + 3) + 2;
        let mut s = (want - m.bits() as i64).max(0);
        s += (self.exp - s).rem_euclid(n64);
        let shifted: BigUint = m << s as usize;
        let r = shifted.nth_root(n);
        let exact = Pow::pow(&r, n) == shifted;
        let e = (self.exp - s) / n64;
        round_magnitude(false, r, e, !exact, prec, rnd)
    }

    pub fn pow_u(&self, n: u32, prec: u32, rnd: Round) -> Self {
        // Exact power followed by one rounding: mantissas stay small in
        // practice and this keeps the result correctly rounded.
        let man = Pow::pow(&self.man, n);
        round_signed(man, self.exp * n as i64, prec, rnd)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest-ish binary64 value; used only for display and heuristics.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.man.magnitude();
        let bits = mag.bits() as i64;
        let (q, e) = if bits > 64 {
            let s = bits - 64;
            ((mag >> s as usize).to_u64().unwrap_or(u64::MAX), self.exp + s)
        } else {
            (mag.to_u64().unwrap_or(u64::MAX), self.exp)
        };
        let v = ldexp(q as f64, e);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Scientific decimal string with `digits` significant digits, rounded
    /// in direction `rnd` (e.g. `-4.196e-1`).
    pub fn to_sci(&self, digits: usize, rnd: Round) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}e0", "0".repeat(digits - 1));
        }
        let neg = self.is_negative();
        // Direction on the magnitude.
        let mag_rnd = match (rnd, neg) {
            (Round::Nearest, _) => Round::Nearest,
            (Round::Up, false) | (Round::Down, true) => Round::Up,
            (Round::Down, false) | (Round::Up, true) => Round::Down,
        };
        let mag = self.man.magnitude().clone();
        let lo_pow = BigUint::from(10u32).pow((digits - 1) as u32);
        let hi_pow = &lo_pow * 10u32;
        let mut d10 = ((self.top() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let mut n;
        loop {
            n = scaled_decimal(&mag, self.exp, digits as i64 - 1 - d10, mag_rnd);
            if n >= hi_pow {
                d10 += 1;
                // Rounding up can carry into a new digit: 9.99.. -> 10.0..
                let again = scaled_decimal(&mag, self.exp, digits as i64 - 1 - d10, mag_rnd);
                if again < hi_pow {
                    n = again;
                    break;
                }
            } else if n < lo_pow {
                d10 -= 1;
            } else {
                break;
            }
        }
        let s = n.to_str_radix(10);
        let (head, tail) = s.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{d10}")
        } else {
            format!("{sign}{head}.{tail}e{d10}")
        }
    }
}

/// `round(mag * 2^exp * 10^s)` as an integer.
fn scaled_decimal(mag: &BigUint, exp: i64, s: i64, rnd: Round) -> BigUint {
    let mut num = mag.clone();
    let mut den = BigUint::one();
    if s >= 0 {
        num *= BigUint::from(10u32).pow(s as u32);
    } else {
        den *= BigUint::from(10u32).pow((-s) as u32);
    }
    if exp >= 0 {
        num <<= exp as usize;
    } else {
        den <<= (-exp) as usize;
    }
    let (q, r) = num.div_rem(&den);
    if r.is_zero() {
        return q;
    }
    let bump = match rnd {
        Round::Down => false,
        Round::Up => true,
        Round::Nearest => {
            let twice = &r << 1usize;
            twice > den || (twice == den && q.is_odd())
        }
    };
    if bump {
        q + 1u32
    } else {
        q
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

fn round_signed(man: BigInt, exp: i64, prec: u32, rnd: Round) -> MpFloat {
    let (sign, mag) = man.into_parts();
    round_magnitude(sign == Sign::Minus, mag, exp, false, prec, rnd)
}

/// Rounds `±(mag + sticky·ε) * 2^exp` to `prec` bits, where `sticky` means the
/// exact value lies strictly between `mag` and `mag + 1` units.
fn round_magnitude(neg: bool, mag: BigUint, exp: i64, sticky: bool, prec: u32, rnd: Round) -> MpFloat {
    assert!(prec >= 2, "precision below 2 bits");
    let (mag, exp) = if sticky {
        // One extra bit below the mantissa marks the inexact tail.
        ((mag << 1usize) | BigUint::one(), exp - 1)
    } else {
        (mag, exp)
    };
    if mag.is_zero() {
        return MpFloat::zero();
    }
    let bits = mag.bits();
    if bits <= prec as u64 {
        let man = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, mag);
        return MpFloat::from_parts(man, exp);
    }
    let shift = (bits - prec as u64) as usize;
    let mut q = &mag >> shift;
    let rem = &mag - (&q << shift);
    let inexact = !rem.is_zero();
    let bump = inexact
        && match rnd {
            Round::Up => !neg,
            Round::Down => neg,
            Round::Nearest => {
                let half = BigUint::one() << (shift - 1);
                match rem.cmp(&half) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => q.is_odd(),
                }
            }
        };
    if bump {
        q += 1u32;
    }
    let man = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, q);
    MpFloat::from_parts(man, exp + shift as i64)
}

fn div_parts(a: &BigInt, ea: i64, b: &BigInt, eb: i64, prec: u32, rnd: Round) -> MpFloat {
    if a.is_zero() {
        return MpFloat::zero();
    }
    let neg = a.is_negative() != b.is_negative();
    let ma = a.magnitude();
    let mb = b.magnitude();
    let s = (prec as i64 + 3 + mb.bits() as i64 - ma.bits() as i64).max(0);
    let (q, r) = (ma << s as usize).div_rem(mb);
    round_magnitude(neg, q, ea - eb - s, !r.is_zero(), prec, rnd)
}

impl Ord for MpFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = self.man.magnitude() << (self.exp - e) as usize;
                let b = other.man.magnitude() << (other.exp - e) as usize;
                a.cmp(&b)
            }
            ord => ord,
        };
        if sa < 0 {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpFloat({}·2^{} ≈ {:e})", self.man, self.exp, self.to_f64())
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_sci(digits, Round::Nearest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: &MpFloat) -> BigRational {
        v.to_rational()
    }

    #[test]
    fn f64_round_trip() {
        for v in [0.0, 1.0, -2.5, 1e-300, 5e-324, f64::MAX, 0.1] {
            assert_eq!(MpFloat::from_f64(v).to_f64(), v);
        }
    }

    #[test]
    fn directed_division_brackets_one_third() {
        let one = MpFloat::one();
        let three = MpFloat::from_i64(3);
        let lo = one.div(&three, 64, Round::Down);
        let hi = one.div(&three, 64, Round::Up);
        let third = BigRational::new(1.into(), 3.into());
        assert!(q(&lo) < third && third < q(&hi));
        assert_eq!(hi.sub(&lo, 200, Round::Nearest), MpFloat::from_parts(1.into(), -65));
    }

    #[test]
    fn nearest_ties_to_even() {
        // 0b1011 at 3 bits: tie between 0b1010 and 0b1100 -> even mantissa 0b110.
        let v = MpFloat::from_i64(11);
        assert_eq!(v.round(3, Round::Nearest), MpFloat::from_i64(12));
        let v = MpFloat::from_i64(9);
        assert_eq!(v.round(3, Round::Nearest), MpFloat::from_i64(8));
        assert_eq!(MpFloat::from_i64(-9).round(3, Round::Up), MpFloat::from_i64(-8));
        assert_eq!(MpFloat::from_i64(-9).round(3, Round::Down), MpFloat::from_i64(-10));
    }

    #[test]
    fn sqrt_two_bracketed() {
        let two = MpFloat::from_i64(2);
        let lo = two.sqrt(128, Round::Down);
        let hi = two.sqrt(128, Round::Up);
        assert!(lo.mul_exact(&lo) < two);
        assert!(hi.mul_exact(&hi) > two);
        let four = MpFloat::from_i64(4);
        assert_eq!(four.sqrt(10, Round::Up), two);
        assert_eq!(MpFloat::from_i64(32).root(5, 10, Round::Down), two);
    }

    #[test]
    fn tiny_addend_only_moves_directed_results() {
        let one = MpFloat::one();
        let tiny = MpFloat::from_parts(1.into(), -5000);
        assert_eq!(one.add(&tiny, 64, Round::Nearest), one);
        assert_eq!(one.add(&tiny, 64, Round::Down), one);
        assert!(one.add(&tiny, 64, Round::Up) > one);
        assert!(one.sub(&tiny, 64, Round::Down) < one);
        assert_eq!(one.sub(&tiny, 64, Round::Up), one);
    }

    #[test]
    fn scientific_formatting() {
        let v = MpFloat::from_ratio(&1.into(), &3.into(), 200, Round::Nearest);
        assert_eq!(v.to_sci(5, Round::Nearest), "3.3333e-1");
        assert_eq!(v.to_sci(5, Round::Up), "3.3334e-1");
        assert_eq!(v.neg().to_sci(5, Round::Down), "-3.3334e-1");
        assert_eq!(MpFloat::from_i64(999).to_sci(2, Round::Up), "1.0e3");
        assert_eq!(MpFloat::from_i64(1).to_sci(1, Round::Nearest), "1e0");
        assert_eq!(MpFloat::zero().to_sci(3, Round::Nearest), "0.00e0");
    }

    fn arb_mp() -> impl Strategy<Value = MpFloat> {
        (any::<i64>(), -200i64..200).prop_map(|(m, e)| MpFloat::from_parts(BigInt::from(m), e))
    }

    proptest! {
        #[test]
        fn directed_ops_bracket_exact(a in arb_mp(), b in arb_mp(), prec in 2u32..100) {
            let exact_sum = q(&a) + q(&b);
            prop_assert!(q(&a.add(&b, prec, Round::Down)) <= exact_sum);
            prop_assert!(q(&a.add(&b, prec, Round::Up)) >= exact_sum);
            let exact_prod = q(&a) * q(&b);
            prop_assert!(q(&a.mul(&b, prec, Round::Down)) <= exact_prod);
            prop_assert!(q(&a.mul(&b, prec, Round::Up)) >= exact_prod);
            if !b.is_zero() {
                let exact_quot = q(&a) / q(&b);
                prop_assert!(q(&a.div(&b, prec, Round::Down)) <= exact_quot.clone());
                prop_assert!(q(&a.div(&b, prec, Round::Up)) >= exact_quot);
            }
        }

        #[test]
        fn rounding_is_tight(a in arb_mp(), b in arb_mp(), prec in 2u32..100) {
            let lo = a.add(&b, prec, Round::Down);
            let hi = a.add(&b, prec, Round::Up);
            let near = a.add(&b, prec, Round::Nearest);
            prop_assert!(lo <= near && near <= hi);
            // Down and Up are adjacent representable values (or equal).
            if lo != hi {
                let step = hi.sub(&lo, 400, Round::Nearest);
                let scale = hi.abs().max(lo.abs());
                prop_assert!(step.mul_pow2(prec as i64 - 1) <= scale);
            }
        }

        #[test]
        fn ordering_matches_rationals(a in arb_mp(), b in arb_mp()) {
            prop_assert_eq!(a.cmp(&b), q(&a).cmp(&q(&b)));
        }

        #[test]
        fn roots_bracket(m in 1u64..u64::MAX, e in -100i64..100, n in 2u32..7, prec in 8u32..90) {
            let x = MpFloat::from_parts(BigInt::from(m), e);
            let lo = x.root(n, prec, Round::Down);
            let hi = x.root(n, prec, Round::Up);
            prop_assert!(lo.pow_u(n, 4000, Round::Nearest) <= x);
            prop_assert!(hi.pow_u(n, 4000, Round::Nearest) >= x);
        }
    }
}
