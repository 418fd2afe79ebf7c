use fibroot::verifier::verify_range;
use fibroot::{ClaimId, MpFloat, PrecisionConfig, Report, Status};

fn in_pool(threads: usize, prec: &PrecisionConfig) -> Report {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let mut r = pool.install(|| verify_range::<MpFloat>(2, 12, prec).unwrap());
    r.runtime_seconds = None;
    r
}

#[test]
fn report_does_not_depend_on_thread_count() {
    let prec = PrecisionConfig::default();
    let a = in_pool(1, &prec);
    let b = in_pool(4, &prec);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn report_shape_and_round_trip() {
    let r = in_pool(2, &PrecisionConfig::default());
    assert_eq!(r.results.len(), 11 * ClaimId::ALL.len());
    assert_eq!(r.verdict(), Status::CertifiedPass);
    let ks: Vec<u32> = r.results.iter().map(|c| c.k).collect();
    assert!(ks.windows(2).all(|w| w[0] <= w[1]));
    for c in &r.results {
        let expect = if c.claim.applies(c.k) { Status::CertifiedPass } else { Status::Inapplicable };
        assert_eq!(c.status, expect, "{} at k = {}", c.claim, c.k);
    }
    let text = serde_json::to_string(&r).unwrap();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn starved_range_is_unresolved_not_failed() {
    let prec = PrecisionConfig::new(53, 1e-40, 1).unwrap();
    let r = verify_range::<MpFloat>(4, 7, &prec).unwrap();
    assert!(r.results.iter().all(|c| c.status != Status::Fail));
    assert_eq!(r.verdict(), Status::Unresolved);
}

#[test]
fn empty_range_is_rejected() {
    assert!(verify_range::<MpFloat>(9, 3, &PrecisionConfig::default()).is_err());
    assert!(verify_range::<MpFloat>(1, 3, &PrecisionConfig::default()).is_err());
}
