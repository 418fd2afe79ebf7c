//! Complex midpoint–radius balls.
//!
//! Midpoint products are evaluated as outward-rounded rectangles and then
//! recentred; the half-widths of the rectangle join the propagated radius.
//! Every operation therefore returns a ball containing the exact result for
//! every choice of inputs inside the operand balls.

use std::fmt;

use crate::interval::RealInterval;
use crate::real::{Real, Round};

#[derive(Clone, PartialEq)]
pub struct ComplexBall<R> {
    re: R,
    im: R,
    rad: R,
}

fn up<R: Real>(a: &R, b: &R, prec: u32) -> R {
    a.add(b, prec, Round::Up)
}

fn mul_up<R: Real>(a: &R, b: &R, prec: u32) -> R {
    a.mul(b, prec, Round::Up)
}

impl<R: Real> ComplexBall<R> {
    pub fn new(re: R, im: R, rad: R) -> Self {
        assert!(!rad.is_negative(), "negative ball radius");
        ComplexBall { re, im, rad }
    }

    pub fn exact(re: R, im: R) -> Self {
        ComplexBall { re, im, rad: R::zero() }
    }

    pub fn real(v: R) -> Self {
        Self::exact(v, R::zero())
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_rect(&RealInterval::from_i64(v, prec), &RealInterval::point(R::zero()), R::zero(), prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Self::from_rect(&RealInterval::from_f64(re, prec), &RealInterval::from_f64(im, prec), R::zero(), prec)
    }

    /// Ball covering the rectangle `re × im`, widened by `extra`.
    pub fn from_rect(re: &RealInterval<R>, im: &RealInterval<R>, extra: R, prec: u32) -> Self {
        let (mre, rre) = re.mid_rad(prec);
        let (mim, rim) = im.mid_rad(prec);
        let rad = up(&up(&extra, &rre, prec), &rim, prec);
        ComplexBall { re: mre, im: mim, rad }
    }

    pub fn mid_re(&self) -> &R {
        &self.re
    }

    pub fn mid_im(&self) -> &R {
        &self.im
    }

    pub fn radius(&self) -> &R {
        &self.rad
    }

    pub fn with_radius(&self, rad: R) -> Self {
        Self::new(self.re.clone(), self.im.clone(), rad)
    }

    pub fn midpoint(&self) -> Self {
        Self::exact(self.re.clone(), self.im.clone())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite() && self.rad.is_finite()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Enclosure of the real parts of all points in the ball.
    pub fn re_interval(&self, prec: u32) -> RealInterval<R> {
        RealInterval::new(self.re.sub(&self.rad, prec, Round::Down), self.re.add(&self.rad, prec, Round::Up))
    }

    pub fn im_interval(&self, prec: u32) -> RealInterval<R> {
        RealInterval::new(self.im.sub(&self.rad, prec, Round::Down), self.im.add(&self.rad, prec, Round::Up))
    }

    fn mid_re_iv(&self) -> RealInterval<R> {
        RealInterval::point(self.re.clone())
    }

    fn mid_im_iv(&self) -> RealInterval<R> {
        RealInterval::point(self.im.clone())
    }

    /// Enclosure of the midpoint modulus.
    fn mid_abs(&self, prec: u32) -> RealInterval<R> {
        let s = self.mid_re_iv().sqr(prec).add(&self.mid_im_iv().sqr(prec), prec);
        s.sqrt(prec)
    }

    pub fn neg(&self) -> Self {
        ComplexBall { re: self.re.neg(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn conj(&self) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.neg(), rad: self.rad.clone() }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        let re = self.mid_re_iv().add(&o.mid_re_iv(), prec);
        let im = self.mid_im_iv().add(&o.mid_im_iv(), prec);
        Self::from_rect(&re, &im, up(&self.rad, &o.rad, prec), prec)
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let (a, b) = (self.mid_re_iv(), self.mid_im_iv());
        let (c, d) = (o.mid_re_iv(), o.mid_im_iv());
        let re = a.mul(&c, prec).sub(&b.mul(&d, prec), prec);
        let im = a.mul(&d, prec).add(&b.mul(&c, prec), prec);
        // |xy − m1 m2| ≤ |m1| r2 + |m2| r1 + r1 r2.
        let extra = if self.rad.is_zero() && o.rad.is_zero() {
            R::zero()
        } else {
            let m1 = self.mid_abs(prec);
            let m2 = o.mid_abs(prec);
            let t1 = mul_up(m1.hi(), &o.rad, prec);
            let t2 = mul_up(m2.hi(), &self.rad, prec);
            let t3 = mul_up(&self.rad, &o.rad, prec);
            up(&up(&t1, &t2, prec), &t3, prec)
        };
        Self::from_rect(&re, &im, extra, prec)
    }

    pub fn sqr(&self, prec: u32) -> Self {
        self.mul(self, prec)
    }

    /// Multiplication by a real interval.
    pub fn mul_real(&self, s: &RealInterval<R>, prec: u32) -> Self {
        let (ms, rs) = s.mid_rad(prec);
        let sb = ComplexBall { re: ms, im: R::zero(), rad: rs };
        self.mul(&sb, prec)
    }

    pub fn mul_i64(&self, v: i64, prec: u32) -> Self {
        self.mul_real(&RealInterval::from_i64(v, prec), prec)
    }

    pub fn add_i64(&self, v: i64, prec: u32) -> Self {
        self.add(&Self::from_i64(v, prec), prec)
    }

    /// `1 / self`, or `None` if the ball may contain zero.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must count as "may contain zero"
    pub fn inv(&self, prec: u32) -> Option<Self> {
        let m = self.mid_abs(prec);
        let mlo = m.lo().clone();
        if !(mlo > self.rad) {
            return None;
        }
        let norm2 = self.mid_re_iv().sqr(prec).add(&self.mid_im_iv().sqr(prec), prec);
        let re = self.mid_re_iv().div(&norm2, prec)?;
        let im = self.mid_im_iv().neg().div(&norm2, prec)?;
        // |1/(m+δ) − 1/m| ≤ r / (|m| (|m| − r)).
        let extra = if self.rad.is_zero() {
            R::zero()
        } else {
            let gap = mlo.sub(&self.rad, prec, Round::Down);
            let den = mlo.mul(&gap, prec, Round::Down);
            self.rad.div(&den, prec, Round::Up)
        };
        Some(Self::from_rect(&re, &im, extra, prec))
    }

    pub fn div(&self, o: &Self, prec: u32) -> Option<Self> {
        Some(self.mul(&o.inv(prec)?, prec))
    }

    /// Binary powering: O(log n) multiplications.
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

    /// Certified enclosure of `|z|` over the ball.
    pub fn abs_interval(&self, prec: u32) -> RealInterval<R> {
        let m = self.mid_abs(prec);
        let lo = m.lo().sub(&self.rad, prec, Round::Down);
        let lo = if lo.is_negative() { R::zero() } else { lo };
        RealInterval::new(lo, m.hi().add(&self.rad, prec, Round::Up))
    }

    /// Certified argument enclosure in `[0, 2π)` terms (the bounds may step
    /// slightly outside when the ball touches the positive real axis), or
    /// `None` if the ball may contain the origin.
    pub fn arg_interval(&self, prec: u32) -> Option<RealInterval<R>> {
        let (lo, hi) = R::arg(&self.im, &self.re, prec);
        if self.rad.is_zero() {
            return Some(RealInterval::new(lo, hi));
        }
        let m = self.mid_abs(prec);
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must count as "may contain zero"
        if !(m.lo() > &self.rad) {
            return None;
        }
        // asin(t) ≤ (π/2) t ≤ 2t on [0, 1].
        let delta = self.rad.div(m.lo(), prec, Round::Up).mul_pow2(1);
        Some(RealInterval::new(lo.sub(&delta, prec, Round::Down), hi.add(&delta, prec, Round::Up)))
    }

    /// Enclosure of `|a − b|` over all point pairs.
    pub fn distance(&self, o: &Self, prec: u32) -> RealInterval<R> {
        let d = self.sub(o, prec);
        d.abs_interval(prec)
    }

    /// Certifies that the two balls share no point.
    pub fn disjoint(&self, o: &Self, prec: u32) -> bool {
        let dre = self.mid_re_iv().sub(&o.mid_re_iv(), prec);
        let dim = self.mid_im_iv().sub(&o.mid_im_iv(), prec);
        let d2 = dre.sqr(prec).add(&dim.sqr(prec), prec);
        let rs = up(&self.rad, &o.rad, prec);
        let rs2 = mul_up(&rs, &rs, prec);
        d2.lo() > &rs2
    }

    /// Certifies that the exact point `x + iy` lies outside the ball.
    pub fn excludes(&self, x: &R, y: &R, prec: u32) -> bool {
        self.disjoint(&Self::exact(x.clone(), y.clone()), prec)
    }

    /// Certifies that the exact point `x + iy` lies inside the ball.
    pub fn contains_point(&self, x: &R, y: &R, prec: u32) -> bool {
        let dre = self.mid_re_iv().sub(&RealInterval::point(x.clone()), prec);
        let dim = self.mid_im_iv().sub(&RealInterval::point(y.clone()), prec);
        let d2 = dre.sqr(prec).add(&dim.sqr(prec), prec);
        let r2 = self.rad.mul(&self.rad, prec, Round::Down);
        d2.hi() <= &r2
    }

    /// Mid-point as binary64 parts.
    pub fn approx(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> fmt::Debug for ComplexBall<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(17);
        write!(
            f,
            "({} {:+}i ± {})",
            self.re.to_mp().to_sci(d, Round::Nearest),
            self.im.to_f64(),
            self.rad.to_mp().to_sci(3, Round::Up)
        )
    }
}
