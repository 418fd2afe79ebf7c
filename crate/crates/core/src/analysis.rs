//! Quantities derived from a certified root set, and the bound formulas
//! they are compared against.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::ball::ComplexBall;
use crate::family::FamilyIndex;
use crate::interval::RealInterval;
use crate::real::{Real, Round};
use crate::rootfinder::{RootKind, RootSet};

/// Guard bits added when evaluating bound formulas.
const GUARD: u32 = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    /// Enclosures too wide to decide.
    Unresolved(String),
    /// A certified violation.
    Violation(String),
    /// The quantity does not exist for this `k`.
    Inapplicable(String),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::Unresolved(s) => write!(f, "unresolved: {s}"),
            AnalysisError::Violation(s) => write!(f, "violation: {s}"),
            AnalysisError::Inapplicable(s) => write!(f, "inapplicable: {s}"),
        }
    }
}

impl std::error::Error for AnalysisError {}

/// One modulus level among the roots inside the unit disk.
#[derive(Debug, Clone)]
pub struct ModulusClass<R: Real> {
    /// 1 for the largest small-root modulus.
    pub level_index: usize,
    pub modulus: RealInterval<R>,
    pub members: Vec<usize>,
}

/// Groups the non-dominant roots into strictly ordered modulus levels.
/// Conjugates share a level; any other overlap is left unresolved.
pub fn modulus_classes<R: Real>(rs: &RootSet<R>) -> Result<Vec<ModulusClass<R>>, AnalysisError> {
    let k = rs.k.get() as usize;
    let mut classes: Vec<ModulusClass<R>> = rs
        .roots
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r.kind, RootKind::ComplexUpper | RootKind::NegativeReal))
        .map(|(h, r)| {
            let members = if r.kind == RootKind::ComplexUpper { vec![h, k - h] } else { vec![h] };
            ModulusClass { level_index: 0, modulus: r.modulus.clone(), members }
        })
        .collect();
    classes.sort_by(|a, b| b.modulus.lo().partial_cmp(a.modulus.lo()).expect("finite moduli"));
    for w in classes.windows(2) {
        if !w[0].modulus.certainly_gt(&w[1].modulus) {
            return Err(AnalysisError::Unresolved(format!(
                "modulus intervals of roots {:?} and {:?} overlap",
                w[0].members, w[1].members
            )));
        }
    }
    for (i, c) in classes.iter_mut().enumerate() {
        c.level_index = i + 1;
    }
    Ok(classes)
}

#[derive(Debug, Clone)]
pub struct SectorMap {
    /// `root_of_sector[h]` is the index of the root whose argument lies in sector `h`.
    pub root_of_sector: Vec<usize>,
    /// Lower bound on `min_j (π/k − |θ_j − 2πh_j/k|) / (π/k)`.
    pub min_relative_slack: f64,
    /// Root attaining that minimum (lowest index on ties).
    pub tightest_root: usize,
}

/// Places every argument interval strictly inside one sector
/// `(2πh/k − π/k, 2πh/k + π/k)` and checks that the placement is a bijection.
pub fn sector_assignment<R: Real>(rs: &RootSet<R>) -> Result<SectorMap, AnalysisError> {
    let k = rs.k.get() as usize;
    let bits = rs.bits() + GUARD;
    let pi = RealInterval::<R>::pi(bits);
    let pi_k = pi.div(&RealInterval::from_i64(k as i64, bits), bits).expect("k > 0");
    let mut sector_of = Vec::with_capacity(k);
    let mut slack = f64::INFINITY;
    let mut tightest = 0;
    for (i, r) in rs.roots.iter().enumerate() {
        let a = &r.argument;
        let (lo, hi) = (a.lo().to_f64(), a.hi().to_f64());
        let c = ((lo + hi) / 2.0 * k as f64 / std::f64::consts::TAU).round() as i64;
        let centre = pi_k.mul(&RealInterval::from_i64(2 * c, bits), bits);
        let left = centre.sub(&pi_k, bits);
        let right = centre.add(&pi_k, bits);
        if !a.strictly_inside(left.hi(), right.lo()) {
            return Err(AnalysisError::Unresolved(format!("argument of root {i} straddles a sector boundary")));
        }
        // Deviation from the centre, then slack relative to π/k.
        let dev = R::max_of(
            &a.hi().sub(centre.lo(), bits, Round::Up),
            &centre.hi().sub(a.lo(), bits, Round::Up),
        );
        let gap = pi_k.lo().sub(&dev, bits, Round::Down);
        let rel = gap.div(pi_k.hi(), bits, Round::Down).to_f64();
        if rel < slack {
            slack = rel;
            tightest = i;
        }
        sector_of.push(c.rem_euclid(k as i64) as usize);
    }
    let mut root_of_sector = vec![usize::MAX; k];
    for (i, &h) in sector_of.iter().enumerate() {
        if root_of_sector[h] != usize::MAX {
            return Err(AnalysisError::Violation(format!(
                "sector {h} holds roots {} and {i}",
                root_of_sector[h]
            )));
        }
        root_of_sector[h] = i;
    }
    if let Some(h) = root_of_sector.iter().position(|&i| i == usize::MAX) {
        return Err(AnalysisError::Violation(format!("sector {h} holds no root")));
    }
    Ok(SectorMap { root_of_sector, min_relative_slack: slack, tightest_root: tightest })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    AllPairs,
    SmallOnly,
}

#[derive(Debug, Clone)]
pub struct Separation<R: Real> {
    /// Enclosure of the minimum pairwise distance.
    pub min: RealInterval<R>,
    pub pair: (usize, usize),
}

/// Minimum pairwise distance over a list of balls.
///
/// Squared midpoint distances pick the witness; the lower endpoint uses the
/// smallest squared distance minus the largest radius sum over all pairs.
pub fn min_distance<R: Real>(balls: &[ComplexBall<R>], bits: u32) -> Separation<R> {
    assert!(balls.len() >= 2, "need at least two balls");
    let mut best: Option<(RealInterval<R>, (usize, usize))> = None;
    let mut min_lo: Option<R> = None;
    let mut rmax = R::zero();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let (a, b) = (&balls[i], &balls[j]);
            let dre = RealInterval::point(a.mid_re().clone()).sub(&RealInterval::point(b.mid_re().clone()), bits);
            let dim = RealInterval::point(a.mid_im().clone()).sub(&RealInterval::point(b.mid_im().clone()), bits);
            let d2 = dre.sqr(bits).add(&dim.sqr(bits), bits);
            let rs = a.radius().add(b.radius(), bits, Round::Up);
            rmax = R::max_of(&rmax, &rs);
            if min_lo.as_ref().is_none_or(|m| d2.lo() < m) {
                min_lo = Some(d2.lo().clone());
            }
            if best.as_ref().is_none_or(|(m, _)| d2.lo() < m.lo()) {
                best = Some((d2, (i, j)));
            }
        }
    }
    let (d2, pair) = best.expect("at least one pair");
    let lo = min_lo.expect("at least one pair").sqrt(bits, Round::Down).sub(&rmax, bits, Round::Down);
    let lo = if lo.is_negative() { R::zero() } else { lo };
    let (a, b) = (&balls[pair.0], &balls[pair.1]);
    let hi = d2
        .hi()
        .sqrt(bits, Round::Up)
        .add(&a.radius().add(b.radius(), bits, Round::Up), bits, Round::Up);
    Separation { min: RealInterval::new(lo, hi), pair }
}

pub fn min_separation<R: Real>(rs: &RootSet<R>, scope: Scope) -> Separation<R> {
    let skip = match scope {
        Scope::AllPairs => 0,
        Scope::SmallOnly => 1,
    };
    let balls: Vec<ComplexBall<R>> = rs.roots.iter().skip(skip).map(|r| r.value.clone()).collect();
    let mut s = min_distance(&balls, rs.bits());
    s.pair = (s.pair.0 + skip, s.pair.1 + skip);
    s
}

#[derive(Debug, Clone)]
pub struct RatioSeparation<R: Real> {
    /// Enclosure of `min (ρ_i/ρ_j − 1)` over distinct levels `i < j`.
    pub excess: RealInterval<R>,
    /// Level indices of the minimizing pair.
    pub pair: (usize, usize),
}

/// Minimum over adjacent levels of `ρ_i/ρ_{i+1} − 1`; the levels are
/// strictly ordered, so the global minimum is adjacent.
pub fn min_modulus_ratio<R: Real>(
    classes: &[ModulusClass<R>],
    bits: u32,
) -> Result<RatioSeparation<R>, AnalysisError> {
    let pairs: Vec<(usize, usize)> = (0..classes.len().saturating_sub(1)).map(|i| (i, i + 1)).collect();
    ratio_over(classes, &pairs, bits)
}

/// Full scan over every level pair, for cross-checking the adjacent reduction.
pub fn min_modulus_ratio_all_pairs<R: Real>(
    classes: &[ModulusClass<R>],
    bits: u32,
) -> Result<RatioSeparation<R>, AnalysisError> {
    let n = classes.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    ratio_over(classes, &pairs, bits)
}

fn ratio_over<R: Real>(
    classes: &[ModulusClass<R>],
    pairs: &[(usize, usize)],
    bits: u32,
) -> Result<RatioSeparation<R>, AnalysisError> {
    if classes.len() < 2 {
        return Err(AnalysisError::Inapplicable("fewer than two modulus levels".into()));
    }
    let one = RealInterval::<R>::from_i64(1, bits);
    let mut best: Option<RatioSeparation<R>> = None;
    for &(i, j) in pairs {
        let q = classes[i]
            .modulus
            .div(&classes[j].modulus, bits)
            .ok_or_else(|| AnalysisError::Unresolved("modulus interval contains zero".into()))?
            .sub(&one, bits);
        best = Some(match best {
            None => RatioSeparation { excess: q, pair: (classes[i].level_index, classes[j].level_index) },
            Some(b) => {
                let pair = if q.lo() < b.excess.lo() { (classes[i].level_index, classes[j].level_index) } else { b.pair };
                RatioSeparation { excess: b.excess.min(&q), pair }
            }
        });
    }
    Ok(best.expect("non-empty pair list"))
}

/// `1/α_ℓ` for every root, followed by the exact root 1 of `h_k`.
pub fn reversed_roots<R: Real>(rs: &RootSet<R>) -> Vec<ComplexBall<R>> {
    let bits = rs.bits();
    let mut out: Vec<ComplexBall<R>> = rs
        .roots
        .iter()
        .map(|r| r.value.inv(bits).expect("certified root balls exclude zero"))
        .collect();
    out.push(ComplexBall::from_i64(1, bits));
    out
}

/// With or without the factor `(π/e)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    Full,
    PolyOnly,
}

fn int_iv<R: Real>(v: BigInt, bits: u32) -> RealInterval<R> {
    RealInterval::from_int(&v, bits)
}

/// `k^{num/den}` as the `den`-th root of the exact integer `k^num`.
fn k_pow_frac<R: Real>(k: FamilyIndex, num: u32, den: u32, bits: u32) -> RealInterval<R> {
    int_iv::<R>(BigInt::from(k.get()).pow(num), bits).root(den, bits)
}

fn pi_over_e_pow<R: Real>(k: FamilyIndex, bits: u32) -> RealInterval<R> {
    let q = RealInterval::<R>::pi(bits).div(&RealInterval::e(bits), bits).expect("e > 0");
    q.pow_u(k.get(), bits)
}

fn recip<R: Real>(v: &RealInterval<R>, bits: u32) -> RealInterval<R> {
    v.recip(bits).expect("positive denominator")
}

/// `1/(k^{6.6} (π/e)^k)`, or `1/k^{6.6}`.
pub fn bound_thm2<R: Real>(k: FamilyIndex, variant: BoundVariant, bits: u32) -> RealInterval<R> {
    let b = bits + GUARD;
    let mut den = k_pow_frac::<R>(k, 33, 5, b);
    if variant == BoundVariant::Full {
        den = den.mul(&pi_over_e_pow(k, b), b);
    }
    recip(&den, b)
}

/// `1/(10 k^{9.6} (π/e)^k)`, or `1/(10 k^{9.6})`: the excess over 1 in the
/// ratio bound.
pub fn bound_thm1_excess<R: Real>(k: FamilyIndex, variant: BoundVariant, bits: u32) -> RealInterval<R> {
    let b = bits + GUARD;
    let mut den = k_pow_frac::<R>(k, 48, 5, b).mul(&RealInterval::from_i64(10, b), b);
    if variant == BoundVariant::Full {
        den = den.mul(&pi_over_e_pow(k, b), b);
    }
    recip(&den, b)
}

/// `1 + 1/(10 k^{9.6} (π/e)^k)` (or without the exponential factor).
pub fn bound_thm1<R: Real>(k: FamilyIndex, variant: BoundVariant, bits: u32) -> RealInterval<R> {
    let b = bits + GUARD;
    bound_thm1_excess::<R>(k, variant, bits).add(&RealInterval::from_i64(1, b), b)
}

/// `1/(k^{3/2} 3^{k/2}) = sqrt(1/(k^3 3^k))`.
pub fn bound_weak<R: Real>(k: FamilyIndex, bits: u32) -> RealInterval<R> {
    let b = bits + GUARD;
    let den = BigInt::from(k.get()).pow(3u32) * BigInt::from(3).pow(k.get());
    RealInterval::<R>::from_ratio(&BigInt::one(), &den, b).sqrt(b)
}

/// `sqrt(3 |disc|) / (d^{d/2+1} ‖h_k‖_2^{d−1})` with `d = k + 1` and
/// `‖h_k‖_2 = √6`, evaluated as `sqrt(3|disc| / (d^{d+2} 6^{d−1}))`.
pub fn bound_mahler_mignotte<R: Real>(k: FamilyIndex, disc: &BigInt, bits: u32) -> RealInterval<R> {
    let b = bits + GUARD;
    let d = k.get() + 1;
    let num = disc * 3;
    let den = BigInt::from(d).pow(d + 2) * BigInt::from(6).pow(d - 1);
    RealInterval::<R>::from_ratio(&num, &den, b).sqrt(b)
}

/// `(1 − ln3/k, 1 − 1/(2^8 k^3))`, the modulus window for small roots.
pub fn modulus_window<R: Real>(k: FamilyIndex, bits: u32) -> (RealInterval<R>, RealInterval<R>) {
    let b = bits + GUARD;
    let one = RealInterval::<R>::from_i64(1, b);
    let kk = RealInterval::<R>::from_i64(k.get() as i64, b);
    let lower = one.sub(&RealInterval::ln3(b).div(&kk, b).expect("k > 0"), b);
    let cube = BigInt::from(k.get()).pow(3u32) << 8;
    let upper = one.sub(&RealInterval::from_ratio(&BigInt::one(), &cube, b), b);
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::PrecisionConfig;
    use crate::poly::discriminant_closed_form;
    use crate::rootfinder::solve_all;
    use crate::MpFloat;

    fn k(v: u32) -> FamilyIndex {
        FamilyIndex::new(v).unwrap()
    }

    fn roots(v: u32) -> RootSet<MpFloat> {
        solve_all(k(v), &PrecisionConfig::default()).unwrap()
    }

    fn near(i: &RealInterval<MpFloat>, want: f64, rel: f64) -> bool {
        let (lo, hi) = (i.lo().to_f64(), i.hi().to_f64());
        (lo - want).abs() <= rel * want.abs() && (hi - want).abs() <= rel * want.abs()
    }

    #[test]
    fn classes_for_small_orders() {
        let c = modulus_classes(&roots(2)).unwrap();
        assert_eq!(c.len(), 1);
        let c = modulus_classes(&roots(3)).unwrap();
        assert_eq!(c.len(), 1);
        assert!(near(&c[0].modulus, 0.7373527057603277, 1e-14));
        assert_eq!(c[0].members, vec![1, 2]);
        let c = modulus_classes(&roots(4)).unwrap();
        assert_eq!(c.len(), 2);
        assert!(near(&c[0].modulus, 0.8182760987795398, 1e-14));
        assert!(near(&c[1].modulus, 0.7748041132154339, 1e-14));
        assert_eq!(c[1].members, vec![2]);
    }

    #[test]
    fn class_count_by_parity() {
        for v in [7u32, 8, 13, 20] {
            let c = modulus_classes(&roots(v)).unwrap();
            let want = if v % 2 == 1 { (v - 1) / 2 } else { v / 2 };
            assert_eq!(c.len() as u32, want, "k = {v}");
        }
    }

    #[test]
    fn sectors_are_identity_on_sector_ordered_roots() {
        for v in [2u32, 3, 4, 9] {
            let m = sector_assignment(&roots(v)).unwrap();
            assert_eq!(m.root_of_sector, (0..v as usize).collect::<Vec<_>>());
            assert!(m.min_relative_slack > 0.0);
        }
    }

    #[test]
    fn separations_match_oracle() {
        let s = min_separation(&roots(2), Scope::AllPairs);
        assert!(near(&s.min, 2.23606797749979, 1e-14));
        let s = min_separation(&roots(3), Scope::AllPairs);
        assert!(near(&s.min, 1.2125814584143987, 1e-14));
        assert_eq!(s.pair, (1, 2));
        let s = min_separation(&roots(4), Scope::AllPairs);
        assert!(near(&s.min, 1.0730982097080252, 1e-14));
        let s = min_separation(&roots(5), Scope::AllPairs);
        assert!(near(&s.min, 0.917072374546289, 1e-14));
    }

    #[test]
    fn modulus_ratio_matches_oracle_and_full_scan() {
        for (v, want) in [(4u32, 0.05610706606047477), (5, 0.06382491426769622)] {
            let rs = roots(v);
            let c = modulus_classes(&rs).unwrap();
            let adj = min_modulus_ratio(&c, rs.bits()).unwrap();
            assert!(near(&adj.excess, want, 1e-12));
            let all = min_modulus_ratio_all_pairs(&c, rs.bits()).unwrap();
            assert_eq!(adj.pair, all.pair);
        }
        for v in [11u32, 16] {
            let rs = roots(v);
            let c = modulus_classes(&rs).unwrap();
            let a = min_modulus_ratio(&c, rs.bits()).unwrap();
            let b = min_modulus_ratio_all_pairs(&c, rs.bits()).unwrap();
            assert_eq!(a.pair, b.pair);
            assert!(a.excess.overlaps(&b.excess));
        }
        let rs = roots(3);
        let c = modulus_classes(&rs).unwrap();
        assert!(matches!(min_modulus_ratio(&c, 128), Err(AnalysisError::Inapplicable(_))));
    }

    #[test]
    fn reversed_roots_of_golden_ratio() {
        let y = reversed_roots(&roots(2));
        assert_eq!(y.len(), 3);
        assert!((y[0].mid_re().to_f64() - 0.6180339887498949).abs() < 1e-15);
        assert!((y[1].mid_re().to_f64() + 1.618033988749895).abs() < 1e-15);
        let s = min_distance(&y, 128);
        assert!(near(&s.min, 0.3819660112501051, 1e-14));
    }

    #[test]
    fn bound_values_match_oracle() {
        let b = 128;
        assert!(near(&bound_thm2::<MpFloat>(k(4), BoundVariant::Full, b), 5.956381335336755e-5, 1e-14));
        assert!(near(&bound_thm1_excess::<MpFloat>(k(4), BoundVariant::Full, b), 9.30684583646368e-8, 1e-14));
        assert!(near(&bound_thm2::<MpFloat>(k(100), BoundVariant::PolyOnly, b), 1.0 / 100f64.powf(6.6), 1e-13));
        assert!(near(&bound_thm2::<MpFloat>(k(100), BoundVariant::Full, b), 3.269346269763552e-20, 1e-14));
        assert!(near(&bound_thm1_excess::<MpFloat>(k(100), BoundVariant::Full, b), 3.269346269763552e-27, 1e-14));
        assert!(near(&bound_weak::<MpFloat>(k(100), b), 1.3929555690985383e-27, 1e-14));
        let mm = |v: u32| bound_mahler_mignotte::<MpFloat>(k(v), &discriminant_closed_form(k(v)), b);
        assert!(near(&mm(2), 0.041408666249996105, 1e-14));
        assert!(near(&mm(3), 0.02442924874908036, 1e-14));
        assert!(near(&mm(100), 2.043911745635982e-27, 1e-14));
        assert!(near(&mm(150), 1.318528381466049e-39, 1e-14));
    }

    #[test]
    fn binary64_bounds_meet_multiprecision_ones() {
        for v in [4u32, 50, 200] {
            let wide = bound_thm2::<f64>(k(v), BoundVariant::Full, 53);
            let tight = bound_thm2::<MpFloat>(k(v), BoundVariant::Full, 200);
            // Both enclose the exact value, so they must intersect.
            assert!(&wide.lo().to_mp() <= tight.hi() && tight.lo() <= &wide.hi().to_mp());
            assert!(wide.width(53) / wide.lo() < 1e-12);
        }
    }
}
