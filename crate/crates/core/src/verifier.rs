//! Claim registry, per-order evaluation and the aggregated report.
//!
//! Every claim compares a measured enclosure against a bound enclosure.
//! A claim passes only when the inequality holds for every point of both,
//! fails only when the reverse inequality is certain, and is otherwise
//! unresolved.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, AnalysisError, BoundVariant, Scope};
use crate::family::{Error, FamilyIndex, PrecisionConfig};
use crate::interval::RealInterval;
use crate::poly;
use crate::real::{Real, Round};
use crate::rootfinder::{self, alpha_bracket, CertCheck, RootSet, Unresolved};

pub const REPORT_SCHEMA: &str = "fibroot-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    L1,
    L2R1,
    T1,
    T2,
    #[serde(rename = "T1_POLY")]
    T1Poly,
    #[serde(rename = "T2_POLY")]
    T2Poly,
    #[serde(rename = "WEAK")]
    Weak,
    #[serde(rename = "MM_CHAIN")]
    MmChain,
    #[serde(rename = "DISC")]
    Disc,
    #[serde(rename = "ALPHA")]
    Alpha,
}

impl ClaimId {
    pub const ALL: [ClaimId; 10] = [
        ClaimId::L1,
        ClaimId::L2R1,
        ClaimId::T1,
        ClaimId::T2,
        ClaimId::T1Poly,
        ClaimId::T2Poly,
        ClaimId::Weak,
        ClaimId::MmChain,
        ClaimId::Disc,
        ClaimId::Alpha,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::L1 => "L1",
            ClaimId::L2R1 => "L2R1",
            ClaimId::T1 => "T1",
            ClaimId::T2 => "T2",
            ClaimId::T1Poly => "T1_POLY",
            ClaimId::T2Poly => "T2_POLY",
            ClaimId::Weak => "WEAK",
            ClaimId::MmChain => "MM_CHAIN",
            ClaimId::Disc => "DISC",
            ClaimId::Alpha => "ALPHA",
        }
    }

    /// The inequality checked, in words.
    pub fn statement(self) -> &'static str {
        match self {
            ClaimId::L1 => "1 - ln3/k < rho < 1 - 1/(2^8 k^3) for every small root",
            ClaimId::L2R1 => "each sector (2 pi h/k - pi/k, 2 pi h/k + pi/k) holds exactly one root argument",
            ClaimId::T1 => "min rho_i/rho_j - 1 > 1/(10 k^9.6 (pi/e)^k)",
            ClaimId::T2 => "min |a_i - a_j| > 1/(k^6.6 (pi/e)^k)",
            ClaimId::T1Poly => "min rho_i/rho_j - 1 > 1/(10 k^9.6)",
            ClaimId::T2Poly => "min |a_i - a_j| > 1/k^6.6",
            ClaimId::Weak => "min |a_i - a_j| > 1/(k^1.5 3^(k/2))",
            ClaimId::MmChain => "min distance over {1} and reciprocal roots > Mahler-Mignotte bound",
            ClaimId::Disc => "closed-form discriminant equals the resultant",
            ClaimId::Alpha => "2 - 2^(1-k) < alpha_k < 2",
        }
    }

    /// Whether the claim is stated for this order.
    pub fn applies(self, k: u32) -> bool {
        match self {
            ClaimId::L1 | ClaimId::T1 | ClaimId::T2 => k >= 4,
            ClaimId::T1Poly | ClaimId::T2Poly => (4..=99).contains(&k),
            ClaimId::Weak | ClaimId::MmChain => k >= 100,
            ClaimId::Disc => k <= poly::ORACLE_CAP,
            ClaimId::L2R1 | ClaimId::Alpha => true,
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    CertifiedPass,
    Fail,
    Inapplicable,
    Unresolved,
}

impl Status {
    /// Fail dominates Unresolved, which dominates everything else.
    fn severity(self) -> u8 {
        match self {
            Status::CertifiedPass | Status::Inapplicable => 0,
            Status::Unresolved => 1,
            Status::Fail => 2,
        }
    }

    fn worse(self, o: Status) -> Status {
        if o.severity() > self.severity() {
            o
        } else {
            self
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::CertifiedPass => "CertifiedPass",
            Status::Fail => "Fail",
            Status::Inapplicable => "Inapplicable",
            Status::Unresolved => "Unresolved",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub k: u32,
    pub claim: ClaimId,
    pub status: Status,
    /// Relative slack `(measured − bound)/bound` on the side that matters;
    /// `None` for exact or inapplicable claims.
    pub margin: Option<f64>,
    /// Root indices, or modulus-level indices for T1 and T1_POLY.
    pub witness: Option<Vec<usize>>,
    /// Precision of the enclosures behind the verdict; 0 for exact claims.
    pub bits_used: u32,
}

impl ClaimResult {
    fn new(k: u32, claim: ClaimId, status: Status, bits_used: u32) -> Self {
        ClaimResult { k, claim, status, margin: None, witness: None, bits_used }
    }
}

struct Outcome {
    status: Status,
    margin: f64,
}

impl Outcome {
    fn and(self, o: Outcome) -> Outcome {
        Outcome { status: self.status.worse(o.status), margin: self.margin.min(o.margin) }
    }
}

/// `measured > bound`.
fn exceeds<R: Real>(measured: &RealInterval<R>, bound: &RealInterval<R>, bits: u32) -> Outcome {
    let status = if measured.lo() > bound.hi() {
        Status::CertifiedPass
    } else if measured.hi() <= bound.lo() {
        Status::Fail
    } else {
        Status::Unresolved
    };
    let margin = measured.lo().sub(bound.hi(), bits, Round::Down).div(bound.hi(), bits, Round::Down).to_f64();
    Outcome { status, margin }
}

/// `measured < bound`, with slack relative to the bound.
fn below<R: Real>(measured: &RealInterval<R>, bound: &RealInterval<R>, bits: u32) -> Outcome {
    let status = if measured.hi() < bound.lo() {
        Status::CertifiedPass
    } else if measured.lo() >= bound.hi() {
        Status::Fail
    } else {
        Status::Unresolved
    };
    let margin = bound.lo().sub(measured.hi(), bits, Round::Down).div(bound.lo(), bits, Round::Down).to_f64();
    Outcome { status, margin }
}

fn finish(k: u32, claim: ClaimId, o: Outcome, witness: Vec<usize>, bits: u32) -> ClaimResult {
    ClaimResult { k, claim, status: o.status, margin: Some(o.margin), witness: Some(witness), bits_used: bits }
}

fn check_modulus_window<R: Real>(rs: &RootSet<R>) -> ClaimResult {
    let k = rs.k;
    let bits = rs.bits();
    let (lower, upper) = analysis::modulus_window::<R>(k, bits);
    let mut worst: Option<(Outcome, usize)> = None;
    for (i, r) in rs.roots.iter().enumerate().skip(1) {
        let o = exceeds(&r.modulus, &lower, bits).and(below(&r.modulus, &upper, bits));
        let replace = match &worst {
            None => true,
            Some((w, _)) => o.status.severity() > w.status.severity() || (o.status == w.status && o.margin < w.margin),
        };
        if replace {
            worst = Some((o, i));
        }
    }
    let (o, i) = worst.expect("k >= 4 has small roots");
    finish(k.get(), ClaimId::L1, o, vec![i], bits)
}

fn sector_result<R: Real>(rs: &RootSet<R>) -> ClaimResult {
    let k = rs.k.get();
    match analysis::sector_assignment(rs) {
        Ok(m) => ClaimResult {
            margin: Some(m.min_relative_slack),
            witness: Some(vec![m.tightest_root]),
            ..ClaimResult::new(k, ClaimId::L2R1, Status::CertifiedPass, rs.bits())
        },
        Err(AnalysisError::Violation(msg)) => {
            log::error!("k = {k}: sector bijection violated: {msg}");
            ClaimResult::new(k, ClaimId::L2R1, Status::Fail, rs.bits())
        }
        Err(_) => ClaimResult::new(k, ClaimId::L2R1, Status::Unresolved, rs.bits()),
    }
}

fn check_ratio<R: Real>(rs: &RootSet<R>, claim: ClaimId, variant: BoundVariant) -> ClaimResult {
    let k = rs.k;
    let bits = rs.bits();
    let classes = match analysis::modulus_classes(rs) {
        Ok(c) => c,
        Err(_) => return ClaimResult::new(k.get(), claim, Status::Unresolved, bits),
    };
    match analysis::min_modulus_ratio(&classes, bits) {
        Ok(sep) => {
            let bound = analysis::bound_thm1_excess::<R>(k, variant, bits);
            finish(k.get(), claim, exceeds(&sep.excess, &bound, bits), vec![sep.pair.0, sep.pair.1], bits)
        }
        Err(AnalysisError::Inapplicable(_)) => ClaimResult::new(k.get(), claim, Status::Inapplicable, bits),
        Err(_) => ClaimResult::new(k.get(), claim, Status::Unresolved, bits),
    }
}

fn check_separation<R: Real>(rs: &RootSet<R>, claim: ClaimId, bound: RealInterval<R>) -> ClaimResult {
    let bits = rs.bits();
    let sep = analysis::min_separation(rs, Scope::AllPairs);
    finish(rs.k.get(), claim, exceeds(&sep.min, &bound, bits), vec![sep.pair.0, sep.pair.1], bits)
}

fn check_mm_chain<R: Real>(rs: &RootSet<R>) -> ClaimResult {
    let k = rs.k;
    let bits = rs.bits();
    let ys = analysis::reversed_roots(rs);
    let sep = analysis::min_distance(&ys, bits);
    let bound = analysis::bound_mahler_mignotte::<R>(k, &poly::discriminant_closed_form(k), bits);
    finish(k.get(), ClaimId::MmChain, exceeds(&sep.min, &bound, bits), vec![sep.pair.0, sep.pair.1], bits)
}

fn check_disc(k: FamilyIndex) -> ClaimResult {
    let status = match poly::discriminant_resultant_oracle(k) {
        Ok(v) if v == poly::discriminant_closed_form(k) => Status::CertifiedPass,
        Ok(_) => Status::Fail,
        Err(_) => Status::Unresolved,
    };
    ClaimResult::new(k.get(), ClaimId::Disc, status, 0)
}

fn check_alpha<R: Real>(k: FamilyIndex, prec: &PrecisionConfig) -> ClaimResult {
    match rootfinder::dominant_root::<R>(k, prec) {
        Ok(ball) => {
            // Enough bits to resolve 2 − α_k < 2^{1−k}.
            let bits = prec.working_bits.max(k.get() + 64);
            let bits = R::MAX_BITS.map_or(bits, |c| bits.min(c));
            let a = ball.re_interval(bits);
            let (lo, hi) = alpha_bracket::<R>(k, bits);
            finish(k.get(), ClaimId::Alpha, exceeds(&a, &lo, bits).and(below(&a, &hi, bits)), vec![0], bits)
        }
        Err(Error::BoundViolated(msg)) => {
            log::error!("{msg}");
            ClaimResult::new(k.get(), ClaimId::Alpha, Status::Fail, prec.working_bits)
        }
        Err(_) => ClaimResult::new(k.get(), ClaimId::Alpha, Status::Unresolved, prec.working_bits),
    }
}

/// Root-dependent claims when certification did not succeed.
fn unresolved_claims<R: Real>(k: FamilyIndex, err: &Unresolved<R>) -> Vec<ClaimResult> {
    let kk = k.get();
    let mut out = Vec::new();
    for c in [ClaimId::L1, ClaimId::L2R1, ClaimId::T1, ClaimId::T2, ClaimId::T1Poly, ClaimId::T2Poly, ClaimId::Weak, ClaimId::MmChain] {
        if !c.applies(kk) {
            out.push(ClaimResult::new(kk, c, Status::Inapplicable, err.bits));
            continue;
        }
        let mut r = ClaimResult::new(kk, c, Status::Unresolved, err.bits);
        // A sector failure with every other check passing is a definite answer.
        if c == ClaimId::L2R1 {
            if let Some(p) = err.partial.as_ref().filter(|p| p.failed_check == Some(CertCheck::Sector)) {
                r = sector_result(p);
            }
        }
        out.push(r);
    }
    out
}

/// Every claim for one order, sorted by claim id.
pub fn verify_k<R: Real>(k: FamilyIndex, prec: &PrecisionConfig) -> Vec<ClaimResult> {
    verify_solved(k, prec, &rootfinder::solve_all::<R>(k, prec))
}

/// As [`verify_k`], reusing an existing outcome of `solve_all`.
pub fn verify_solved<R: Real>(
    k: FamilyIndex,
    prec: &PrecisionConfig,
    solved: &Result<RootSet<R>, Unresolved<R>>,
) -> Vec<ClaimResult> {
    let kk = k.get();
    let mut out = match solved {
        Ok(rs) => {
            let bits = rs.bits();
            let inapplicable = |c: ClaimId| ClaimResult::new(kk, c, Status::Inapplicable, bits);
            let gate = |c: ClaimId, f: &dyn Fn() -> ClaimResult| if c.applies(kk) { f() } else { inapplicable(c) };
            vec![
                gate(ClaimId::L1, &|| check_modulus_window(rs)),
                sector_result(rs),
                gate(ClaimId::T1, &|| check_ratio(rs, ClaimId::T1, BoundVariant::Full)),
                gate(ClaimId::T2, &|| {
                    check_separation(rs, ClaimId::T2, analysis::bound_thm2(k, BoundVariant::Full, bits))
                }),
                gate(ClaimId::T1Poly, &|| check_ratio(rs, ClaimId::T1Poly, BoundVariant::PolyOnly)),
                gate(ClaimId::T2Poly, &|| {
                    check_separation(rs, ClaimId::T2Poly, analysis::bound_thm2(k, BoundVariant::PolyOnly, bits))
                }),
                gate(ClaimId::Weak, &|| check_separation(rs, ClaimId::Weak, analysis::bound_weak(k, bits))),
                gate(ClaimId::MmChain, &|| check_mm_chain(rs)),
            ]
        }
        Err(e) => {
            log::warn!("{e}");
            unresolved_claims(k, e)
        }
    };
    out.push(if ClaimId::Disc.applies(kk) { check_disc(k) } else { ClaimResult::new(kk, ClaimId::Disc, Status::Inapplicable, 0) });
    out.push(check_alpha::<R>(k, prec));
    out.sort_by_key(|r| r.claim);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub k_min: u32,
    pub k_max: u32,
    pub working_bits: u32,
    pub target_radius: f64,
    pub max_escalations: u32,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Smallest margin per claim over the results that carry one.
    pub worst_margin_per_claim: BTreeMap<ClaimId, Option<f64>>,
    pub verdict: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub config: ReportConfig,
    pub results: Vec<ClaimResult>,
    pub summary: Summary,
    /// Wall-clock time; `None` when omitted for reproducible output.
    pub runtime_seconds: Option<f64>,
}

impl Report {
    pub fn from_results(k_min: u32, k_max: u32, prec: &PrecisionConfig, mut results: Vec<ClaimResult>) -> Report {
        results.sort_by_key(|r| (r.k, r.claim));
        let mut worst: BTreeMap<ClaimId, Option<f64>> = BTreeMap::new();
        let mut verdict = Status::CertifiedPass;
        for r in &results {
            verdict = verdict.worse(r.status);
            let slot = worst.entry(r.claim).or_insert(None);
            if let Some(m) = r.margin {
                *slot = Some(slot.map_or(m, |w: f64| w.min(m)));
            }
        }
        Report {
            schema: REPORT_SCHEMA.to_string(),
            config: ReportConfig {
                k_min,
                k_max,
                working_bits: prec.working_bits,
                target_radius: prec.target_radius,
                max_escalations: prec.max_escalations,
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            results,
            summary: Summary { worst_margin_per_claim: worst, verdict },
            runtime_seconds: None,
        }
    }

    pub fn verdict(&self) -> Status {
        self.summary.verdict
    }
}

/// Runs [`verify_k`] for every order in `k_min..=k_max`, in parallel on the
/// current rayon pool; the result order does not depend on scheduling.
pub fn verify_range<R: Real>(k_min: u32, k_max: u32, prec: &PrecisionConfig) -> Result<Report, Error> {
    let lo = FamilyIndex::new(k_min)?;
    if k_max < k_min {
        return Err(Error::InvalidOrder(k_max as i64));
    }
    let start = Instant::now();
    let results: Vec<ClaimResult> = (lo.get()..=k_max)
        .into_par_iter()
        .flat_map_iter(|k| verify_k::<R>(FamilyIndex::new(k).expect("k >= k_min >= 2"), prec))
        .collect();
    let mut report = Report::from_results(k_min, k_max, prec, results);
    report.runtime_seconds = Some(start.elapsed().as_secs_f64());
    Ok(report)
}
