//! k-generalized Fibonacci numbers and the growth-rate cross-check.
//!
//! `F_n = F_{n−1} + … + F_{n−k}` with `F_i = 0` for `i = −(k−2), …, 0` and
//! `F_1 = 1`.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedSub, One, Signed, Zero};

use crate::family::{Error, FamilyIndex, PrecisionConfig};
use crate::interval::RealInterval;
use crate::mpfloat::MpFloat;
use crate::real::{Real, Round};
use crate::rootfinder::dominant_root;

/// Streaming state holding the last `k` values.
///
/// The window is kept with a running sum, so each step costs one addition
/// and one subtraction. Fixed-width integers report overflow as `None`.
#[derive(Debug, Clone)]
pub struct KFibState<T = BigInt> {
    k: FamilyIndex,
    window: VecDeque<T>,
    /// `None` once the running sum no longer fits in `T`.
    sum: Option<T>,
    index: i64,
}

impl<T> KFibState<T>
where
    T: Clone + Zero + One + CheckedAdd + CheckedSub,
{
    /// State positioned at `n = 1`.
    pub fn new(k: FamilyIndex) -> Self {
        let mut window: VecDeque<T> = (0..k.get() - 1).map(|_| T::zero()).collect();
        window.push_back(T::one());
        KFibState { k, window, sum: Some(T::one()), index: 1 }
    }

    pub fn k(&self) -> FamilyIndex {
        self.k
    }

    /// Index `n` of the newest value.
    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn current(&self) -> &T {
        self.window.back().expect("window holds k values")
    }

    /// Oldest to newest: `F_{n−k+1}, …, F_n`.
    pub fn window(&self) -> impl Iterator<Item = &T> {
        self.window.iter()
    }

    /// Advances to `n + 1`; `None` on overflow (state left unchanged).
    pub fn advance(&mut self) -> Option<&T> {
        let next = self.sum.clone()?;
        let oldest = self.window.pop_front().expect("window holds k values");
        self.sum = next.checked_sub(&oldest).and_then(|d| d.checked_add(&next));
        self.window.push_back(next);
        self.index += 1;
        Some(self.current())
    }
}

impl<T> Iterator for KFibState<T>
where
    T: Clone + Zero + One + CheckedAdd + CheckedSub,
{
    type Item = T;

    /// Yields `F_2, F_3, …` until overflow.
    fn next(&mut self) -> Option<T> {
        self.advance().cloned()
    }
}

/// Exact `F_n^{(k)}` for `n >= −(k−2)`.
pub fn kfib(k: FamilyIndex, n: i64) -> Result<BigInt, Error> {
    let low = 2 - k.get() as i64;
    if n < low {
        return Err(Error::IndexOutOfRange { k: k.get(), n });
    }
    if n <= 0 {
        return Ok(BigInt::zero());
    }
    let mut s = KFibState::<BigInt>::new(k);
    while s.index() < n {
        s.advance().expect("big integers never overflow");
    }
    Ok(s.current().clone())
}

/// Enclosure of `|F_{n+1}/F_n − α_k|`, with the ratio kept exact.
pub fn growth_check<R: Real>(k: FamilyIndex, n: i64, prec: &PrecisionConfig) -> Result<RealInterval<R>, Error> {
    if n < 1 {
        return Err(Error::IndexOutOfRange { k: k.get(), n });
    }
    let fnn = kfib(k, n)?;
    let fn1 = kfib(k, n + 1)?;
    let ratio = BigRational::new(fn1, fnn);
    let alpha = dominant_root::<R>(k, prec)?;
    let bits = prec.working_bits;
    let iv = alpha.re_interval(bits);
    let lo = iv.lo().to_mp().to_rational() - &ratio;
    let hi = iv.hi().to_mp().to_rational() - &ratio;
    // |ratio − α| over α ∈ [lo, hi] (shifted by the ratio).
    let (dmin, dmax) = if lo.is_negative() && hi.is_positive() {
        (BigRational::zero(), lo.abs().max(hi.abs()))
    } else {
        let (a, b) = (lo.abs(), hi.abs());
        if a < b { (a, b) } else { (b, a) }
    };
    let down = MpFloat::from_ratio(dmin.numer(), dmin.denom(), bits, Round::Down);
    let up = MpFloat::from_ratio(dmax.numer(), dmax.denom(), bits, Round::Up);
    Ok(RealInterval::new(R::from_mp(&down, bits, Round::Down), R::from_mp(&up, bits, Round::Up)))
}
