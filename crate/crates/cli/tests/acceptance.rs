//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Roots for every order are solved once and shared by the criteria that
//! need them.

use std::process::{Command, Output};
use std::time::{Duration, Instant};

use fibroot::analysis::sector_assignment;
use fibroot::poly::{disc_f_from_disc_g, discriminant_closed_form, discriminant_resultant_oracle, ORACLE_CAP};
use fibroot::recurrence::{growth_check, kfib};
use fibroot::rootfinder::{certify_bijection, dominant_root, solve_all, CertCheck, Unresolved};
use fibroot::verifier::verify_solved;
use fibroot::{
    Ball, BigIntValue, ClaimId, ClaimResult, FamilyIndex, Interval, MpFloat, PrecisionConfig, Roots, RootKind, Status,
};
use rayon::prelude::*;

const K_MAX: u32 = 200;
const DISC_BUDGET: Duration = Duration::from_secs(30);
const SOLVE_BUDGET: Duration = Duration::from_secs(600);
const RADIUS_TARGET: f64 = 1e-40;
const PHI_DIGITS: u32 = 30;
const TRIB_DIGITS: u32 = 10;
const GROWTH_N: i64 = 200;
const GROWTH_TOL: f64 = 1e-10;
const CHECK_BITS: u32 = 256;

// Frozen from an independent 60-digit evaluation.
const PHI: &str = "1.618033988749894848204586834365638117720309179805762862135";
const TRIBONACCI: &str = "1.839286755214161132551852564653286600424178746097592246778";
const TRIBONACCI_SHORT: &str = "1.839286755";

const FIBONACCI_30: [u64; 30] = [
    1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765, 10946, 17711, 28657,
    46368, 75025, 121393, 196418, 317811, 514229, 832040,
];

struct Solved {
    k: u32,
    roots: Result<Roots, Unresolved<MpFloat>>,
    claims: Vec<ClaimResult>,
}

fn fk(v: u32) -> FamilyIndex {
    FamilyIndex::new(v).expect("order >= 2")
}

/// Decimal string as an exact point interval.
fn decimal(s: &str) -> Interval {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let num: BigIntValue = format!("{int}{frac}").parse().expect("decimal literal");
    let den = BigIntValue::from(10).pow(frac.len() as u32);
    Interval::from_ratio(&num, &den, CHECK_BITS)
}

fn ten_pow_neg(d: u32) -> Interval {
    Interval::from_ratio(&BigIntValue::from(1), &BigIntValue::from(10).pow(d), CHECK_BITS)
}

/// `|a − b| < 10^{−d}` for every point of both.
fn agrees_to(a: &Interval, b: &Interval, d: u32) -> bool {
    let diff = a.sub(b, CHECK_BITS).abs();
    diff.certainly_lt(&ten_pow_neg(d))
}

fn claim(s: &Solved, c: ClaimId) -> Option<&ClaimResult> {
    s.claims.iter().find(|r| r.claim == c)
}

fn claims_pass(all: &[Solved], c: ClaimId, ks: std::ops::RangeInclusive<u32>) -> Result<(), String> {
    for s in all.iter().filter(|s| ks.contains(&s.k)) {
        match claim(s, c) {
            Some(r) if r.status == Status::CertifiedPass => {}
            Some(r) => return Err(format!("{c} at k = {}: {}", s.k, r.status)),
            None => return Err(format!("{c} missing at k = {}", s.k)),
        }
    }
    Ok(())
}

fn worst_margin(all: &[Solved], c: ClaimId, ks: std::ops::RangeInclusive<u32>) -> f64 {
    all.iter()
        .filter(|s| ks.contains(&s.k))
        .filter_map(|s| claim(s, c).and_then(|r| r.margin))
        .fold(f64::INFINITY, f64::min)
}

fn criterion_disc() -> Result<String, String> {
    let start = Instant::now();
    for v in 2..=ORACLE_CAP {
        let closed = discriminant_closed_form(fk(v));
        let oracle = discriminant_resultant_oracle(fk(v)).map_err(|e| e.to_string())?;
        if closed != oracle {
            return Err(format!("k = {v}: closed form {closed} != resultant {oracle}"));
        }
    }
    for v in 2..=K_MAX {
        let m = BigIntValue::from(v - 1).pow(2);
        if discriminant_closed_form(fk(v)) % &m != BigIntValue::from(0) {
            return Err(format!("k = {v}: (k-1)^2 does not divide the discriminant"));
        }
        disc_f_from_disc_g(fk(v)).map_err(|e| e.to_string())?;
    }
    for (v, want) in [(2, 5), (3, 44)] {
        let got = disc_f_from_disc_g(fk(v)).map_err(|e| e.to_string())?;
        if got != BigIntValue::from(want) {
            return Err(format!("disc_f({v}) = {got}, expected {want}"));
        }
    }
    let took = start.elapsed();
    if took > DISC_BUDGET {
        return Err(format!("took {took:.1?}, budget {DISC_BUDGET:?}"));
    }
    Ok(format!("oracle k<={ORACLE_CAP}, divisibility k<={K_MAX}, {took:.2?}"))
}

fn check_root_set(k: u32, rs: &Roots) -> Result<(), String> {
    let bits = rs.bits();
    let n = k as usize;
    if rs.roots.len() != n {
        return Err(format!("k = {k}: {} balls", rs.roots.len()));
    }
    let target = MpFloat::from_f64(RADIUS_TARGET);
    let zero = MpFloat::zero();
    let one = MpFloat::one();
    for (i, r) in rs.roots.iter().enumerate() {
        if *r.value.radius() > target {
            return Err(format!("k = {k}: root {i} radius {:e}", r.value.radius().to_f64()));
        }
        if !r.value.excludes(&one, &zero, bits) {
            return Err(format!("k = {k}: root {i} contains 1"));
        }
        for (j, o) in rs.roots.iter().enumerate().skip(i + 1) {
            if !r.value.disjoint(&o.value, bits) {
                return Err(format!("k = {k}: roots {i} and {j} overlap"));
            }
        }
    }
    let mut sum = Ball::from_i64(0, bits);
    let mut prod = Ball::from_i64(1, bits);
    for r in &rs.roots {
        sum = sum.add(&r.value, bits);
        prod = prod.mul(&r.value, bits);
    }
    if !sum.contains_point(&one, &zero, bits) {
        return Err(format!("k = {k}: Vieta sum {:?} misses 1", sum.approx()));
    }
    if !prod.abs_interval(bits).contains(&one) {
        return Err(format!("k = {k}: |product| misses 1"));
    }
    for h in 1..n {
        let (r, c) = (&rs.roots[h], &rs.roots[n - h]);
        let paired = match r.kind {
            RootKind::ComplexUpper => c.kind == RootKind::ComplexLower,
            RootKind::ComplexLower => c.kind == RootKind::ComplexUpper,
            RootKind::NegativeReal => h == n - h,
            RootKind::Dominant => false,
        };
        let exact = c.value.mid_re() == r.value.mid_re()
            && *c.value.mid_im() == r.value.mid_im().neg()
            && c.value.radius() == r.value.radius();
        if !paired || !exact {
            return Err(format!("k = {k}: roots {h} and {} are not an exact conjugate pair", n - h));
        }
    }
    if rs.roots[0].kind != RootKind::Dominant {
        return Err(format!("k = {k}: root 0 is not the dominant root"));
    }
    Ok(())
}

fn criterion_roots(all: &[Solved], took: Duration) -> Result<String, String> {
    let mut worst = 0f64;
    for s in all {
        let rs = s.roots.as_ref().map_err(|e| e.to_string())?;
        check_root_set(s.k, rs)?;
        worst = worst.max(rs.max_radius().to_f64());
    }
    if took > SOLVE_BUDGET {
        return Err(format!("took {took:.1?}, budget {SOLVE_BUDGET:?}"));
    }
    Ok(format!("k 2..={K_MAX}, max radius {worst:.2e}, {took:.1?}"))
}

fn criterion_sectors(all: &[Solved]) -> Result<String, String> {
    let mut slack = f64::INFINITY;
    for s in all {
        let rs = s.roots.as_ref().map_err(|e| e.to_string())?;
        let map = sector_assignment(rs).map_err(|e| format!("k = {}: {e}", s.k))?;
        let mut seen = map.root_of_sector.clone();
        seen.sort_unstable();
        if seen != (0..s.k as usize).collect::<Vec<_>>() {
            return Err(format!("k = {}: sector map is not a permutation", s.k));
        }
        slack = slack.min(map.min_relative_slack);
    }
    claims_pass(all, ClaimId::L2R1, 2..=K_MAX)?;
    Ok(format!("k 2..={K_MAX}, min relative slack {slack:.3}"))
}

fn criterion_claims(all: &[Solved], wanted: &[(ClaimId, u32, u32)]) -> Result<String, String> {
    let mut parts = Vec::new();
    for &(c, lo, hi) in wanted {
        claims_pass(all, c, lo..=hi)?;
        parts.push(format!("{c} k {lo}..={hi} worst margin {:.3e}", worst_margin(all, c, lo..=hi)));
    }
    Ok(parts.join("; "))
}

fn criterion_alpha(all: &[Solved]) -> Result<String, String> {
    claims_pass(all, ClaimId::Alpha, 2..=K_MAX)?;
    let prec = PrecisionConfig::default();
    let a2 = dominant_root::<MpFloat>(fk(2), &prec).map_err(|e| e.to_string())?;
    if !agrees_to(&a2.re_interval(CHECK_BITS), &decimal(PHI), PHI_DIGITS) {
        return Err(format!("alpha_2 {:?} differs from phi", a2.approx()));
    }
    let a3 = dominant_root::<MpFloat>(fk(3), &prec).map_err(|e| e.to_string())?;
    let a3iv = a3.re_interval(CHECK_BITS);
    if !agrees_to(&a3iv, &decimal(TRIBONACCI), 40) || !agrees_to(&a3iv, &decimal(TRIBONACCI_SHORT), TRIB_DIGITS - 1) {
        return Err(format!("alpha_3 {:?} differs from the tribonacci constant", a3.approx()));
    }
    Ok(format!(
        "bracket k 2..={K_MAX}, worst margin {:.3e}; phi to {PHI_DIGITS} digits; tribonacci to {TRIB_DIGITS}",
        worst_margin(all, ClaimId::Alpha, 2..=K_MAX)
    ))
}

fn criterion_recurrence() -> Result<String, String> {
    for (i, &want) in FIBONACCI_30.iter().enumerate() {
        let n = i as i64 + 1;
        let got = kfib(fk(2), n).map_err(|e| e.to_string())?;
        if got != BigIntValue::from(want) {
            return Err(format!("kfib(2, {n}) = {got}, expected {want}"));
        }
    }
    let prec = PrecisionConfig::default();
    let mut worst = 0f64;
    for v in 2..=10 {
        let g = growth_check::<MpFloat>(fk(v), GROWTH_N, &prec).map_err(|e| e.to_string())?;
        let hi = g.hi().to_f64();
        if hi.is_nan() || hi >= GROWTH_TOL {
            return Err(format!("growth_check({v}, {GROWTH_N}) <= {hi:e}"));
        }
        worst = worst.max(hi);
    }
    Ok(format!("kfib(2, 1..=30) exact; growth_check(k, {GROWTH_N}) <= {worst:.2e} for k 2..=10"))
}

fn fibroot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibroot"))
        .args(args)
        .env_remove("FIBROOT_DEFAULT_BITS")
        .output()
        .expect("spawn fibroot")
}

fn criterion_robustness(all: &[Solved]) -> Result<String, String> {
    for format in ["json", "csv", "human"] {
        let run = |p: &str| fibroot(&["verify", "--k", "2..16", "--parallel", p, "--omit-runtime", "--format", format]);
        let (a, b) = (run("1"), run("4"));
        if a.status.code() != Some(0) || b.status.code() != Some(0) {
            return Err(format!("{format}: exit codes {:?} and {:?}", a.status.code(), b.status.code()));
        }
        if a.stdout != b.stdout {
            return Err(format!("{format} reports differ between --parallel 1 and 4"));
        }
    }

    let s = all.iter().find(|s| s.k == 10).ok_or("k = 10 not solved")?;
    let mut tampered = s.roots.as_ref().map_err(|e| e.to_string())?.clone();
    tampered.roots[3] = tampered.roots[2].clone();
    let tampered = certify_bijection(tampered);
    if tampered.certified || tampered.failed_check != Some(CertCheck::Disjointness) {
        return Err(format!("duplicated root accepted: {:?}", tampered.failed_check));
    }

    let starved = fibroot(&["verify", "--k", "4..6", "--bits", "53", "--max-escalations", "1", "--format", "csv"]);
    let text = String::from_utf8_lossy(&starved.stdout);
    if starved.status.code() != Some(2) {
        return Err(format!("starved run exited {:?}", starved.status.code()));
    }
    if text.lines().any(|l| l.split(',').any(|f| f == "Fail")) {
        return Err("starved run reported Fail".into());
    }
    Ok("json/csv/human byte-identical across --parallel 1 and 4; duplicate rejected; starved run exits 2".into())
}

fn main() {
    let prec = PrecisionConfig::default();
    let mut lines: Vec<(u32, &str, Result<String, String>)> = Vec::new();

    lines.push((1, "discriminant closed form", criterion_disc()));

    let start = Instant::now();
    let all: Vec<Solved> = (2..=K_MAX)
        .into_par_iter()
        .map(|k| {
            let roots = solve_all::<MpFloat>(fk(k), &prec);
            let claims = verify_solved(fk(k), &prec, &roots);
            Solved { k, roots, claims }
        })
        .collect();
    let took = start.elapsed();

    lines.push((2, "certified root balls", criterion_roots(&all, took)));
    lines.push((3, "modulus window", criterion_claims(&all, &[(ClaimId::L1, 4, K_MAX)])));
    lines.push((4, "sector bijection", criterion_sectors(&all)));
    lines.push((5, "root separation", criterion_claims(&all, &[(ClaimId::T2, 4, K_MAX), (ClaimId::T2Poly, 4, 99)])));
    lines.push((6, "modulus ratio", criterion_claims(&all, &[(ClaimId::T1, 4, K_MAX), (ClaimId::T1Poly, 4, 99)])));
    lines.push((7, "classical bounds", criterion_claims(&all, &[(ClaimId::Weak, 100, 150), (ClaimId::MmChain, 100, 150)])));
    lines.push((8, "dominant root", criterion_alpha(&all)));
    lines.push((9, "recurrence", criterion_recurrence()));
    lines.push((10, "determinism and robustness", criterion_robustness(&all)));

    let mut failed = 0;
    for (n, name, r) in &lines {
        match r {
            Ok(detail) => println!("PASS [{n:>2}] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL [{n:>2}] {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
