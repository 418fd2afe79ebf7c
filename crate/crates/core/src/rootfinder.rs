//! Certified enclosures of all roots of `f_k`.
//!
//! Roots are refined independently by Newton's method on `g_k`, starting
//! from one guess per sector in the closed upper half-plane. The lower half
//! is filled in by exact conjugation. A ball around `z` of radius
//! `(k+1)|g_k(z)/g_k'(z)|` contains a root of `g_k`; once the `k` balls are
//! pairwise disjoint and none contains 1, each holds exactly one root of
//! `f_k`. A real midpoint then forces that root to be real, since its
//! conjugate lies in the same ball.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis;
use crate::ball::ComplexBall;
use crate::family::{Error, FamilyIndex, PrecisionConfig};
use crate::interval::RealInterval;
use crate::poly::{eval_g, eval_g_prime};
use crate::real::{Real, Round};

const MAX_NEWTON_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Dominant,
    ComplexUpper,
    ComplexLower,
    NegativeReal,
}

impl RootKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RootKind::Dominant => "dominant",
            RootKind::ComplexUpper => "complex_upper",
            RootKind::ComplexLower => "complex_lower",
            RootKind::NegativeReal => "negative_real",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RootBall<R: Real> {
    pub value: ComplexBall<R>,
    pub sector_h: u32,
    pub kind: RootKind,
    pub modulus: RealInterval<R>,
    pub argument: RealInterval<R>,
}

/// The individual checks run by [`certify_bijection`], in the order tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertCheck {
    Count,
    Disjointness,
    ExcludesOne,
    VietaSum,
    VietaProduct,
    Conjugation,
    Kind,
    Sector,
}

impl fmt::Display for CertCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CertCheck::Count => "root count",
            CertCheck::Disjointness => "pairwise disjointness",
            CertCheck::ExcludesOne => "exclusion of 1",
            CertCheck::VietaSum => "Vieta sum",
            CertCheck::VietaProduct => "Vieta product",
            CertCheck::Conjugation => "conjugate pairing",
            CertCheck::Kind => "root kind",
            CertCheck::Sector => "sector bijection",
        };
        f.write_str(s)
    }
}

/// All `k` roots, indexed by sector: `roots[h]` lies in sector `h`.
#[derive(Debug, Clone)]
pub struct RootSet<R: Real> {
    pub k: FamilyIndex,
    pub roots: Vec<RootBall<R>>,
    pub precision_used: PrecisionConfig,
    pub certified: bool,
    pub failed_check: Option<CertCheck>,
}

impl<R: Real> RootSet<R> {
    pub fn bits(&self) -> u32 {
        self.precision_used.working_bits
    }

    pub fn dominant(&self) -> &RootBall<R> {
        &self.roots[0]
    }

    pub fn max_radius(&self) -> R {
        self.roots.iter().map(|r| r.value.radius().clone()).fold(R::zero(), |a, b| R::max_of(&a, &b))
    }
}

/// Certification failed at every precision on the ladder.
#[derive(Debug, Clone)]
pub struct Unresolved<R: Real> {
    pub k: FamilyIndex,
    pub bits: u32,
    pub reason: String,
    /// The last fully assembled (but uncertified) set, if refinement got that far.
    pub partial: Option<RootSet<R>>,
}

impl<R: Real> fmt::Display for Unresolved<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k = {}: unresolved at {} bits: {}", self.k, self.bits, self.reason)
    }
}

impl<R: Real> std::error::Error for Unresolved<R> {}

/// One seed per sector: 2 for `h = 0`, else `(1 − ln3/(2k)) e^{2πih/k}`.
pub fn initial_guesses(k: FamilyIndex) -> Vec<Complex64> {
    let kf = k.get() as f64;
    let r = 1.0 - 3f64.ln() / (2.0 * kf);
    let mut out = vec![Complex64::new(2.0, 0.0)];
    out.extend((1..k.get()).map(|h| Complex64::from_polar(r, std::f64::consts::TAU * h as f64 / kf)));
    out
}

/// Newton step `g/g'` in binary64. For `|z| >= 1` the form
/// `z (z − 2 + z^{−k}) / ((k+1) z − 2k)` avoids overflow of `z^k`.
fn step_f64(k: u32, z: Complex64) -> Complex64 {
    let kf = k as f64;
    let den = z * (kf + 1.0) - 2.0 * kf;
    if z.norm() >= 1.0 {
        z * (z - 2.0 + z.powu(k).inv()) / den
    } else {
        let zk1 = z.powu(k - 1);
        (zk1 * z * (z - 2.0) + 1.0) / (zk1 * den)
    }
}

fn magnitude<R: Real>(x: &R) -> i64 {
    x.to_mp().magnitude().unwrap_or(i64::MIN / 2)
}

fn ball_magnitude<R: Real>(b: &ComplexBall<R>) -> i64 {
    magnitude(b.mid_re()).max(magnitude(b.mid_im()))
}

fn effective_bits<R: Real>(bits: u32) -> u32 {
    R::MAX_BITS.map_or(bits, |c| bits.min(c))
}

fn rounded<R: Real>(b: &ComplexBall<R>, bits: u32) -> ComplexBall<R> {
    let re = R::from_mp(&b.mid_re().to_mp(), bits, Round::Nearest);
    let im = R::from_mp(&b.mid_im().to_mp(), bits, Round::Nearest);
    ComplexBall::exact(re, im)
}

/// Refines `z0` to a certified ball around a root of `g_k`.
pub fn refine_newton<R: Real>(k: FamilyIndex, z0: Complex64, prec: &PrecisionConfig) -> Result<ComplexBall<R>, Error> {
    refine_at::<R>(k, z0, effective_bits::<R>(prec.working_bits), prec.target_radius)
}

fn refine_at<R: Real>(k: FamilyIndex, z0: Complex64, bits: u32, target: f64) -> Result<ComplexBall<R>, Error> {
    let fail = |reason: String| Error::NonConvergence { k: k.get(), z0: format!("{z0}"), reason };
    let real_seed = z0.im == 0.0;

    let mut z = z0;
    let mut steps = 0;
    while steps < MAX_NEWTON_STEPS {
        steps += 1;
        let s = step_f64(k.get(), z);
        if !s.is_finite() {
            return Err(fail("binary64 Newton step not finite".into()));
        }
        z -= s;
        if s.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    if real_seed {
        z.im = 0.0;
    }

    let mut zb: ComplexBall<R> = ComplexBall::from_f64(z.re, z.im, bits);
    zb = rounded(&zb, bits);
    let mut prev = i64::MAX;
    while steps < MAX_NEWTON_STEPS {
        steps += 1;
        let g = eval_g(k, &zb, bits)?;
        let d = eval_g_prime(k, &zb, bits)?;
        let Some(s) = g.div(&d, bits) else {
            return Err(fail("derivative ball contains zero".into()));
        };
        let s = s.midpoint();
        if s.mid_re().is_zero() && s.mid_im().is_zero() {
            break;
        }
        zb = rounded(&zb.sub(&s, bits), bits);
        let m = ball_magnitude(&s);
        if m < ball_magnitude(&zb) - bits as i64 + 3 || m >= prev {
            break;
        }
        prev = m;
    }

    let g = eval_g(k, &zb, bits)?;
    let d = eval_g_prime(k, &zb, bits)?;
    let dlo = d.abs_interval(bits).lo().clone();
    if dlo.is_zero() {
        return Err(fail("derivative ball contains zero".into()));
    }
    let deg = R::from_int(&k.degree_g().into(), bits, Round::Up);
    let rad = g.abs_interval(bits).hi().mul(&deg, bits, Round::Up).div(&dlo, bits, Round::Up);
    if !rad.is_finite() {
        return Err(Error::PrecisionExhausted("certification radius overflowed".into()));
    }
    let ball = zb.with_radius(rad);
    let r = ball.radius().to_f64();
    if r > target {
        return Err(fail(format!("radius {r:.3e} above target {target:.1e} at {bits} bits")));
    }
    Ok(ball)
}

/// Refinement that retries once from a rotated seed when the result captures 1.
fn refine_avoiding_one<R: Real>(k: FamilyIndex, z0: Complex64, bits: u32, target: f64) -> Result<ComplexBall<R>, Error> {
    let one = R::from_f64(1.0, bits, Round::Nearest);
    let zero = R::zero();
    let b = refine_at::<R>(k, z0, bits, target)?;
    if b.excludes(&one, &zero, bits) {
        return Ok(b);
    }
    let rot = Complex64::from_polar(1.0, std::f64::consts::PI / (4.0 * k.get() as f64));
    log::debug!("k = {k}: refinement from {z0} captured 1, retrying rotated");
    refine_at::<R>(k, z0 * rot, bits, target)
}

fn kind_of(k: u32, h: u32) -> RootKind {
    if h == 0 {
        RootKind::Dominant
    } else if 2 * h == k {
        RootKind::NegativeReal
    } else if 2 * h < k {
        RootKind::ComplexUpper
    } else {
        RootKind::ComplexLower
    }
}

/// Extra bits for the dominant root: `2 − α_k < 2^{1−k}`, so its ball must
/// resolve below that gap for the bracket to be decidable.
fn dominant_bits<R: Real>(k: FamilyIndex, bits: u32) -> u32 {
    effective_bits::<R>(bits.max(k.get() + 64))
}

fn attempt<R: Real>(k: FamilyIndex, prec: &PrecisionConfig) -> Result<RootSet<R>, Error> {
    let kk = k.get();
    let bits = prec.working_bits;
    let guesses = initial_guesses(k);
    let upper: Vec<ComplexBall<R>> = (0..=kk / 2)
        .into_par_iter()
        .map(|h| {
            let b = if h == 0 { dominant_bits::<R>(k, bits) } else { bits };
            let mut z0 = guesses[h as usize];
            if 2 * h == kk {
                z0.im = 0.0;
            }
            refine_avoiding_one::<R>(k, z0, b, prec.target_radius)
        })
        .collect::<Result<_, _>>()?;
    Ok(assemble(k, &upper, *prec))
}

fn assemble<R: Real>(k: FamilyIndex, upper: &[ComplexBall<R>], prec: PrecisionConfig) -> RootSet<R> {
    let kk = k.get();
    let bits = prec.working_bits;
    let roots = (0..kk)
        .map(|h| {
            let kind = kind_of(kk, h);
            let value = match kind {
                RootKind::ComplexLower => upper[(kk - h) as usize].conj(),
                _ => upper[h as usize].clone(),
            };
            let argument = match kind {
                RootKind::Dominant => RealInterval::point(R::zero()),
                RootKind::NegativeReal => RealInterval::pi(bits),
                _ => value.arg_interval(bits).unwrap_or_else(|| {
                    let two_pi = RealInterval::<R>::pi(bits).mul_pow2(1);
                    RealInterval::new(R::zero(), two_pi.hi().clone())
                }),
            };
            let modulus = value.abs_interval(bits);
            RootBall { value, sector_h: h, kind, modulus, argument }
        })
        .collect();
    RootSet { k, roots, precision_used: prec, certified: false, failed_check: None }
}

/// Computes all roots and certifies them, doubling the precision on failure.
pub fn solve_all<R: Real>(k: FamilyIndex, prec: &PrecisionConfig) -> Result<RootSet<R>, Unresolved<R>> {
    let mut last = Unresolved { k, bits: prec.working_bits, reason: "no attempt made".into(), partial: None };
    for bits in prec.ladder(R::MAX_BITS) {
        let p = prec.with_bits(bits);
        match attempt::<R>(k, &p) {
            Ok(rs) => {
                let rs = certify_bijection(rs);
                match rs.failed_check {
                    None => return Ok(rs),
                    Some(c) => {
                        log::info!("k = {k}: {c} check failed at {bits} bits");
                        last = Unresolved { k, bits, reason: format!("{c} check failed"), partial: Some(rs) };
                    }
                }
            }
            Err(e) => {
                log::info!("k = {k}: refinement failed at {bits} bits: {e}");
                last = Unresolved { k, bits, reason: e.to_string(), partial: None };
            }
        }
    }
    Err(last)
}

fn first_failure<R: Real>(rs: &RootSet<R>) -> Option<CertCheck> {
    let kk = rs.k.get() as usize;
    let bits = rs.bits();
    let roots = &rs.roots;

    let count_ok = roots.len() == kk
        && roots.iter().filter(|r| r.kind == RootKind::Dominant).count() == 1
        && roots.iter().any(|r| r.kind == RootKind::NegativeReal) == (kk % 2 == 0);
    if !count_ok {
        return Some(CertCheck::Count);
    }

    for i in 0..kk {
        for j in i + 1..kk {
            if !roots[i].value.disjoint(&roots[j].value, bits) {
                return Some(CertCheck::Disjointness);
            }
        }
    }

    let one = R::from_f64(1.0, bits, Round::Nearest);
    let zero = R::zero();
    if !roots.iter().all(|r| r.value.excludes(&one, &zero, bits)) {
        return Some(CertCheck::ExcludesOne);
    }

    let sum = roots.iter().skip(1).fold(roots[0].value.clone(), |acc, r| acc.add(&r.value, bits));
    if !sum.contains_point(&one, &zero, bits) {
        return Some(CertCheck::VietaSum);
    }

    let prod = roots.iter().skip(1).fold(roots[0].modulus.clone(), |acc, r| acc.mul(&r.modulus, bits));
    if !prod.contains(&one) {
        return Some(CertCheck::VietaProduct);
    }

    for (h, r) in roots.iter().enumerate() {
        let ok = match r.kind {
            RootKind::Dominant | RootKind::NegativeReal => r.value.mid_im().is_zero(),
            RootKind::ComplexUpper => {
                let c = &roots[kk - h];
                c.kind == RootKind::ComplexLower && c.value == r.value.conj() && !r.value.mid_im().is_negative()
            }
            RootKind::ComplexLower => roots[kk - h].kind == RootKind::ComplexUpper,
        };
        if !ok {
            return Some(CertCheck::Conjugation);
        }
    }

    let two = RealInterval::<R>::from_i64(2, bits);
    let unit = RealInterval::<R>::from_i64(1, bits);
    for r in roots {
        let ok = match r.kind {
            RootKind::Dominant => {
                r.modulus.certainly_gt(&unit) && r.modulus.certainly_lt(&two) && !r.value.re_interval(bits).lo().is_negative()
            }
            RootKind::NegativeReal => {
                r.modulus.is_positive() && r.modulus.certainly_lt(&unit) && r.value.re_interval(bits).hi().is_negative()
            }
            _ => r.modulus.is_positive() && r.modulus.certainly_lt(&unit),
        };
        if !ok {
            return Some(CertCheck::Kind);
        }
    }

    if analysis::sector_assignment(rs).is_err() {
        return Some(CertCheck::Sector);
    }
    None
}

/// Runs every certification check and records the first failure.
pub fn certify_bijection<R: Real>(mut rs: RootSet<R>) -> RootSet<R> {
    rs.failed_check = first_failure(&rs);
    rs.certified = rs.failed_check.is_none();
    rs
}

/// Certified real ball for `α_k`, escalating until the bracket
/// `(2 − 2^{1−k}, 2)` is decided.
pub fn dominant_root<R: Real>(k: FamilyIndex, prec: &PrecisionConfig) -> Result<ComplexBall<R>, Error> {
    let mut last = Error::PrecisionExhausted(format!("k = {k}: dominant root bracket undecided"));
    for bits in prec.ladder(R::MAX_BITS) {
        let b = dominant_bits::<R>(k, bits);
        let ball = match refine_at::<R>(k, Complex64::new(2.0, 0.0), b, prec.target_radius) {
            Ok(ball) => ball,
            Err(e) => {
                last = e;
                continue;
            }
        };
        let (lo, hi) = alpha_bracket::<R>(k, b);
        let re = ball.re_interval(b);
        if re.strictly_inside(lo.hi(), hi.lo()) {
            return Ok(ball);
        }
        if re.certainly_lt(&lo) || re.certainly_gt(&hi) {
            return Err(Error::BoundViolated(format!("k = {k}: dominant root enclosure {re:?} lies outside its bracket")));
        }
        last = Error::PrecisionExhausted(format!("k = {k}: bracket undecided at {b} bits"));
    }
    Err(last)
}

/// The endpoints `2 − 2^{1−k}` and `2`.
pub fn alpha_bracket<R: Real>(k: FamilyIndex, bits: u32) -> (RealInterval<R>, RealInterval<R>) {
    let two = RealInterval::<R>::from_i64(2, bits);
    let lo = two.sub(&RealInterval::from_i64(1, bits).mul_pow2(1 - k.get() as i32), bits);
    (lo, two)
}
