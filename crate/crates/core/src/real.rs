//! Scalar abstraction for interval endpoints and ball midpoints.
//!
//! Every operation is rounded in an explicit direction so intervals built on
//! top of it stay enclosures. Two families implement [`Real`]:
//!
//! * IEEE binary floats (`f32`, `f64`) through num-traits. The `prec`
//!   argument is ignored; basic operations are rounded exactly with
//!   error-free transformations, transcendental enclosures are widened by a
//!   few ulps around the platform libm result.
//! * [`MpFloat`], where `prec` is honoured and every operation, including
//!   the constants, is rigorously enclosed.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Float, FloatConst, NumCast, ToPrimitive};

use crate::consts;
use crate::mpfloat::MpFloat;

/// Rounding direction: toward −∞, toward +∞, or to nearest (ties to even).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
            Round::Nearest => Round::Nearest,
        }
    }
}

pub trait Real: Clone + PartialEq + PartialOrd + fmt::Debug + Send + Sync + 'static {
    /// Largest precision the type can honour, `None` when unbounded.
    const MAX_BITS: Option<u32>;

    fn zero() -> Self;
    fn from_int(v: &BigInt, prec: u32, rnd: Round) -> Self;
    fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, rnd: Round) -> Self;
    fn from_f64(v: f64, prec: u32, rnd: Round) -> Self;
    /// Exact conversion of a value already representable in `Self`.
    fn from_mp(v: &MpFloat, prec: u32, rnd: Round) -> Self;

    fn add(&self, rhs: &Self, prec: u32, rnd: Round) -> Self;
    fn sub(&self, rhs: &Self, prec: u32, rnd: Round) -> Self;
    fn mul(&self, rhs: &Self, prec: u32, rnd: Round) -> Self;
    fn div(&self, rhs: &Self, prec: u32, rnd: Round) -> Self;
    /// Square root; `self` must be non-negative.
    fn sqrt(&self, prec: u32, rnd: Round) -> Self;
    /// `n`-th root; `self` must be non-negative.
    fn root(&self, n: u32, prec: u32, rnd: Round) -> Self;
    /// Multiplication by `2^e` (exact unless the format over/underflows).
    fn mul_pow2(&self, e: i32) -> Self;

    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_finite(&self) -> bool;

    fn to_f64(&self) -> f64;
    /// Exact conversion to the multiprecision type (finite values only).
    fn to_mp(&self) -> MpFloat;

    /// Enclosures `(lo, hi)` of mathematical constants.
    fn pi(prec: u32) -> (Self, Self);
    fn e(prec: u32) -> (Self, Self);
    fn ln3(prec: u32) -> (Self, Self);
    /// Enclosure of the argument of the exact point `x + iy` in `[0, 2π)`.
    /// The point must not be the origin.
    fn arg(y: &Self, x: &Self, prec: u32) -> (Self, Self);

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

/// IEEE binary floating point types usable as [`Real`] endpoints.
pub trait IeeeFloat: Float + FloatConst + fmt::Debug + Send + Sync + 'static {
    const MANTISSA_BITS: u32;
    fn step_up(self) -> Self;
    fn step_down(self) -> Self;
}

impl IeeeFloat for f64 {
    const MANTISSA_BITS: u32 = 53;
    fn step_up(self) -> Self {
        self.next_up()
    }
    fn step_down(self) -> Self {
        self.next_down()
    }
}

impl IeeeFloat for f32 {
    const MANTISSA_BITS: u32 = 24;
    fn step_up(self) -> Self {
        self.next_up()
    }
    fn step_down(self) -> Self {
        self.next_down()
    }
}

/// Moves a nearest-rounded result one ulp in the requested direction
/// unless the operation was exact.
fn nudge<F: IeeeFloat>(r: F, exact: bool, rnd: Round) -> F {
    if exact || !r.is_finite() {
        return r;
    }
    match rnd {
        Round::Nearest => r,
        Round::Up => r.step_up(),
        Round::Down => r.step_down(),
    }
}

fn widen<F: IeeeFloat>(v: F, ulps: u32) -> (F, F) {
    let (mut lo, mut hi) = (v, v);
    for _ in 0..ulps {
        lo = lo.step_down();
        hi = hi.step_up();
    }
    (lo, hi)
}

fn float_from_mp<F: IeeeFloat>(v: &MpFloat, rnd: Round) -> F {
    let rounded = v.round(F::MANTISSA_BITS, rnd);
    let approx: F = NumCast::from(rounded.to_f64()).unwrap_or_else(F::nan);
    if F::MANTISSA_BITS == 53 {
        return approx;
    }
    // Narrower formats: correct the binary64 → F cast toward `rnd`.
    let back = MpFloat::from_f64(approx.to_f64().unwrap_or(f64::NAN));
    match rnd {
        Round::Up if back < rounded => approx.step_up(),
        Round::Down if back > rounded => approx.step_down(),
        _ => approx,
    }
}

impl<F: IeeeFloat> Real for F {
    const MAX_BITS: Option<u32> = Some(F::MANTISSA_BITS);

    fn zero() -> Self {
        F::zero()
    }

    fn from_int(v: &BigInt, _prec: u32, rnd: Round) -> Self {
        float_from_mp(&MpFloat::from_parts(v.clone(), 0), rnd)
    }

    fn from_ratio(num: &BigInt, den: &BigInt, _prec: u32, rnd: Round) -> Self {
        let q = MpFloat::from_ratio(num, den, F::MANTISSA_BITS, rnd);
        float_from_mp(&q, rnd)
    }

    fn from_f64(v: f64, _prec: u32, rnd: Round) -> Self {
        float_from_mp(&MpFloat::from_f64(v), rnd)
    }

    fn from_mp(v: &MpFloat, _prec: u32, rnd: Round) -> Self {
        float_from_mp(v, rnd)
    }

    fn add(&self, rhs: &Self, _prec: u32, rnd: Round) -> Self {
        let (a, b) = (*self, *rhs);
        let s = a + b;
        // TwoSum error term.
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        nudge_signed(s, err, rnd)
    }

    fn sub(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        self.add(&rhs.neg(), prec, rnd)
    }

    fn mul(&self, rhs: &Self, _prec: u32, rnd: Round) -> Self {
        let p = *self * *rhs;
        let err = self.mul_add(*rhs, -p);
        nudge_signed(p, err, rnd)
    }

    fn div(&self, rhs: &Self, _prec: u32, rnd: Round) -> Self {
        let q = *self / *rhs;
        // a - q*b has the sign of (true quotient - q) times sign(b).
        let resid = (-q).mul_add(*rhs, *self);
        let err = if rhs.is_sign_negative() { -resid } else { resid };
        nudge_signed(q, err, rnd)
    }

    fn sqrt(&self, _prec: u32, rnd: Round) -> Self {
        let r = Float::sqrt(*self);
        let resid = (-r).mul_add(r, *self);
        nudge_signed(r, resid, rnd)
    }

    fn root(&self, n: u32, prec: u32, rnd: Round) -> Self {
        match n {
            1 => *self,
            2 => Real::sqrt(self, prec, rnd),
            _ => {
                let r = self.powf(F::one() / NumCast::from(n).unwrap());
                let (lo, hi) = widen(r, 4);
                match rnd {
                    Round::Down => lo.max(F::zero()),
                    Round::Up => hi,
                    Round::Nearest => r,
                }
            }
        }
    }

    fn mul_pow2(&self, e: i32) -> Self {
        *self * F::from(2.0).unwrap().powi(e)
    }

    fn neg(&self) -> Self {
        -*self
    }

    fn abs(&self) -> Self {
        Float::abs(*self)
    }

    fn is_zero(&self) -> bool {
        *self == F::zero()
    }

    fn is_negative(&self) -> bool {
        *self < F::zero()
    }

    fn is_finite(&self) -> bool {
        Float::is_finite(*self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_mp(&self) -> MpFloat {
        MpFloat::from_f64(Real::to_f64(self))
    }

    fn pi(_prec: u32) -> (Self, Self) {
        widen(F::PI(), 1)
    }

    fn e(_prec: u32) -> (Self, Self) {
        widen(F::E(), 1)
    }

    fn ln3(_prec: u32) -> (Self, Self) {
        let three: F = NumCast::from(3.0).unwrap();
        widen(three.ln(), 2)
    }

    fn arg(y: &Self, x: &Self, _prec: u32) -> (Self, Self) {
        let mut a = y.atan2(*x);
        if a < F::zero() {
            a = a + F::PI() + F::PI();
        }
        let (lo, hi) = widen(a, 4);
        (lo.max(F::zero()), hi)
    }
}

/// `err` is the signed residual (true − computed).
fn nudge_signed<F: IeeeFloat>(r: F, err: F, rnd: Round) -> F {
    if !err.is_finite() {
        // Overflow or NaN: fall back to unconditional widening.
        return nudge(r, false, rnd);
    }
    match rnd {
        Round::Nearest => r,
        Round::Up if err > F::zero() => r.step_up(),
        Round::Down if err < F::zero() => r.step_down(),
        _ => r,
    }
}

impl Real for MpFloat {
    const MAX_BITS: Option<u32> = None;

    fn zero() -> Self {
        MpFloat::zero()
    }

    fn from_int(v: &BigInt, prec: u32, rnd: Round) -> Self {
        MpFloat::from_int(v, prec, rnd)
    }

    fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, rnd: Round) -> Self {
        MpFloat::from_ratio(num, den, prec, rnd)
    }

    fn from_f64(v: f64, prec: u32, rnd: Round) -> Self {
        MpFloat::from_f64(v).round(prec, rnd)
    }

    fn from_mp(v: &MpFloat, prec: u32, rnd: Round) -> Self {
        v.round(prec, rnd)
    }

    fn add(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        MpFloat::add(self, rhs, prec, rnd)
    }

    fn sub(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        MpFloat::sub(self, rhs, prec, rnd)
    }

    fn mul(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        MpFloat::mul(self, rhs, prec, rnd)
    }

    fn div(&self, rhs: &Self, prec: u32, rnd: Round) -> Self {
        MpFloat::div(self, rhs, prec, rnd)
    }

    fn sqrt(&self, prec: u32, rnd: Round) -> Self {
        MpFloat::sqrt(self, prec, rnd)
    }

    fn root(&self, n: u32, prec: u32, rnd: Round) -> Self {
        MpFloat::root(self, n, prec, rnd)
    }

    fn mul_pow2(&self, e: i32) -> Self {
        MpFloat::mul_pow2(self, e as i64)
    }

    fn neg(&self) -> Self {
        MpFloat::neg(self)
    }

    fn abs(&self) -> Self {
        MpFloat::abs(self)
    }

    fn is_zero(&self) -> bool {
        MpFloat::is_zero(self)
    }

    fn is_negative(&self) -> bool {
        MpFloat::is_negative(self)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn to_f64(&self) -> f64 {
        MpFloat::to_f64(self)
    }

    fn to_mp(&self) -> MpFloat {
        self.clone()
    }

    fn pi(prec: u32) -> (Self, Self) {
        consts::pi(prec)
    }

    fn e(prec: u32) -> (Self, Self) {
        consts::e(prec)
    }

    fn ln3(prec: u32) -> (Self, Self) {
        consts::ln3(prec)
    }

    fn arg(y: &Self, x: &Self, prec: u32) -> (Self, Self) {
        consts::arg(y, x, prec)
    }
}
