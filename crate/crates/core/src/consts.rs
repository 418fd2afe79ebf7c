//! Rigorous enclosures of π, e, ln 3 and of the argument of a point.
//!
//! Series are summed in fixed point at scale `2^-p`. Each routine returns a
//! [`Fixed`] value: an integer centre plus a bound on the accumulated error
//! in units of `2^-p`, which is turned into a directed-rounded pair at the
//! end.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::mpfloat::MpFloat;
use crate::real::Round;

/// Fixed-point value `centre * 2^-p` with `|exact - centre| <= err` units.
#[derive(Clone, Debug)]
struct Fixed {
    centre: BigInt,
    err: BigInt,
}

impl Fixed {
    fn exact(centre: BigInt) -> Self {
        Fixed { centre, err: BigInt::zero() }
    }

    fn add(&self, o: &Fixed) -> Fixed {
        Fixed { centre: &self.centre + &o.centre, err: &self.err + &o.err }
    }

    fn sub(&self, o: &Fixed) -> Fixed {
        Fixed { centre: &self.centre - &o.centre, err: &self.err + &o.err }
    }

    fn scale(&self, m: i64) -> Fixed {
        Fixed { centre: &self.centre * m, err: &self.err * m.abs() }
    }

    /// Division by a positive integer; truncation costs one unit and the
    /// error bound is rounded up.
    fn div_int(&self, d: i64) -> Fixed {
        Fixed { centre: self.centre.div_floor(&BigInt::from(d)), err: &self.err / d + 2 }
    }

    fn enclosure(&self, p: u64, prec: u32) -> (MpFloat, MpFloat) {
        let lo = MpFloat::from_parts(&self.centre - &self.err, -(p as i64)).round(prec, Round::Down);
        let hi = MpFloat::from_parts(&self.centre + &self.err, -(p as i64)).round(prec, Round::Up);
        (lo, hi)
    }
}

fn guard(prec: u32) -> u64 {
    prec as u64 + 40
}

/// `atan(a/b)` (or `atanh(a/b)` when `hyperbolic`) for `0 <= a/b <= 1/2`.
fn arctan_series(a: &BigInt, b: &BigInt, p: u64, hyperbolic: bool) -> Fixed {
    debug_assert!(!a.is_negative() && b.is_positive());
    debug_assert!(a * 2 <= *b);
    let a2 = a * a;
    let b2 = b * b;
    let mut x = (a << p as usize) / b;
    let mut sum = BigInt::zero();
    let mut terms: i64 = 0;
    let mut j: i64 = 0;
    while !x.is_zero() {
        let t = &x / (2 * j + 1);
        if !hyperbolic && j % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        x = (&x * &a2) / &b2;
        j += 1;
        terms += 1;
    }
    // Per term: < 4/3 from the truncated power chain plus < 1 from the
    // division; the tail past the last non-zero power is below 2 units.
    Fixed { centre: sum, err: BigInt::from(3 * terms + 3) }
}

fn pi_fixed(p: u64) -> Fixed {
    static CACHE: OnceLock<Mutex<HashMap<u64, Fixed>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("pi cache poisoned").get(&p) {
        return v.clone();
    }
    // Machin: π = 16 atan(1/5) − 4 atan(1/239).
    let one = BigInt::one();
    let a = arctan_series(&one, &BigInt::from(5), p, false);
    let b = arctan_series(&one, &BigInt::from(239), p, false);
    let v = a.scale(16).sub(&b.scale(4));
    cache.lock().expect("pi cache poisoned").insert(p, v.clone());
    v
}

pub fn pi(prec: u32) -> (MpFloat, MpFloat) {
    let p = guard(prec);
    pi_fixed(p).enclosure(p, prec)
}

pub fn e(prec: u32) -> (MpFloat, MpFloat) {
    let p = guard(prec);
    let mut x = BigInt::one() << p as usize;
    let mut sum = BigInt::zero();
    let mut n: i64 = 0;
    while !x.is_zero() {
        sum += &x;
        n += 1;
        x /= n;
    }
    // Each truncated term is off by < 2 units; the tail is < 4 units.
    Fixed { centre: sum, err: BigInt::from(2 * n + 4) }.enclosure(p, prec)
}

pub fn ln3(prec: u32) -> (MpFloat, MpFloat) {
    let p = guard(prec);
    // ln 3 = 2 atanh(1/2).
    arctan_series(&BigInt::one(), &BigInt::from(2), p, true).scale(2).enclosure(p, prec)
}

/// `atan(n/d)` for `0 <= n <= d`, `d > 0`.
fn atan_unit(n: &BigInt, d: &BigInt, p: u64) -> Fixed {
    // Shift by a known angle c ∈ {0, 1/2, 1}: atan(t) = atan(c) + atan((t−c)/(1+tc)).
    let four_n = n * 4;
    if four_n <= *d {
        arctan_series(n, d, p, false)
    } else if four_n <= (d * 3) {
        let un: BigInt = n * 2 - d;
        let ud: BigInt = d * 2 + n;
        let base = arctan_series(&BigInt::one(), &BigInt::from(2), p, false);
        let rest = arctan_series(&un.abs(), &ud, p, false);
        if un.is_negative() {
            base.sub(&rest)
        } else {
            base.add(&rest)
        }
    } else {
        let un = d - n;
        let ud = d + n;
        let quarter_pi = pi_fixed(p).div_int(4);
        quarter_pi.sub(&arctan_series(&un, &ud, p, false))
    }
}

/// Enclosure of `arg(x + iy)` in `[0, 2π)` for an exact non-zero point.
pub fn arg(y: &MpFloat, x: &MpFloat, prec: u32) -> (MpFloat, MpFloat) {
    assert!(!(x.is_zero() && y.is_zero()), "argument of the origin");
    let p = guard(prec);
    let pi = pi_fixed(p);
    let zero = Fixed::exact(BigInt::zero());
    if y.is_zero() {
        return if x.is_negative() { pi.enclosure(p, prec) } else { zero.enclosure(p, prec) };
    }
    if x.is_zero() {
        let half = pi.div_int(2);
        return if y.is_negative() { pi.add(&half).enclosure(p, prec) } else { half.enclosure(p, prec) };
    }
    // Express |x|, |y| over a common power of two.
    let e = x.exponent().min(y.exponent());
    let ax = x.mantissa().abs() << (x.exponent() - e) as usize;
    let ay = y.mantissa().abs() << (y.exponent() - e) as usize;
    let base = if ay <= ax {
        atan_unit(&ay, &ax, p)
    } else {
        pi.div_int(2).sub(&atan_unit(&ax, &ay, p))
    };
    let theta = match (x.is_negative(), y.is_negative()) {
        (false, false) => base,
        (true, false) => pi.sub(&base),
        (true, true) => pi.add(&base),
        (false, true) => pi.scale(2).sub(&base),
    };
    let (lo, hi) = theta.enclosure(p, prec);
    // Clamp to the range; an exact boundary value is still enclosed.
    let lo = if lo.is_negative() { MpFloat::zero() } else { lo };
    (lo, hi)
}
