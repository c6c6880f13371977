use std::path::PathBuf;

use zesc::lab::{consistency_audit, render_table, reproduce, verify_artifacts, BoundsReport, ReproduceConfig};

fn fixture(k: usize) -> BoundsReport {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/report_k{k}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    BoundsReport::from_json(&text).unwrap()
}

#[test]
fn fixtures_pass_the_audit() {
    for k in [3, 5, 7, 11] {
        let r = fixture(k);
        let a = consistency_audit(&r);
        assert!(a.pass, "k = {k}: {:?}", a.violated);
        let checked = verify_artifacts(&r, 1e-6).unwrap();
        assert!(checked.contains(&"formulas".to_string()));
        assert!(!r.has_errors());
    }
}

#[test]
fn k11_fixture_brackets() {
    let r = fixture(11);
    let a = r.alpha_bracket().unwrap();
    assert!(a.lower >= 16.0 && a.upper <= 67.0, "{a:?}");
    let w = r.omega_bracket().unwrap();
    assert_eq!((w.lower, w.upper), (12.0, 12.0));
    let c = r.chi_bracket().unwrap();
    assert!(c.lower >= 16.0, "{c:?}");
}

#[test]
fn fixture_k7_matches_a_fresh_run() {
    let fresh = reproduce(7, &ReproduceConfig::default()).unwrap().to_json().unwrap();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/report_k7.json");
    let stored = std::fs::read_to_string(path).unwrap();
    assert_eq!(fresh.trim_end(), stored.trim_end());
}

#[test]
fn tampering_is_detected() {
    let mut r = fixture(7);
    r.explicit.as_mut().unwrap().independent_set[0] ^= 1;
    assert!(verify_artifacts(&r, 1e-6).is_err());

    let mut r = fixture(7);
    r.theta[0].certificate.lambda -= 0.5;
    assert!(verify_artifacts(&r, 1e-6).is_err());
}

#[test]
fn degenerate_k5_is_reported_not_failed() {
    let r = fixture(5);
    assert!(r.stages.iter().any(|s| s.status.starts_with("skipped")));
    assert!(render_table(&r).contains("audit: pass"));
}
