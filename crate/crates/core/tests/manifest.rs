//! The verify manifest must name every documented invariant of every module.

use std::collections::BTreeSet;

use incidence_core::verify::{run_check, VerifyConfig, MANIFEST};

/// Invariants documented per module. Adding one here without a matching
/// manifest entry (or the reverse) fails this test.
const DOCUMENTED: &[(&str, &[&str])] = &[
    ("exact-kernel", &["rational-exactness", "sturm-vs-numeric", "resultant-vs-gcd"]),
    (
        "plane-tangency",
        &[
            "common-circle-characterization",
            "common-circle-uniqueness",
            "triple-collinearity",
            "orthogonal-circle-output",
        ],
    ),
    (
        "anchored-space",
        &[
            "anchored-pair-bound",
            "anchored-dual-uniqueness",
            "lift-tangency-equivalence",
            "cubic-surface-vanishing",
            "lifted-pair-bound",
            "dual-params-round-trip",
        ],
    ),
    (
        "dual3",
        &["master-duality", "power-decoding", "line-in-plane-geometric", "rich-planes-completeness"],
    ),
    (
        "incidence-engine",
        &["mode-equivalence", "thread-determinism", "histogram-consistency", "throughput"],
    ),
    (
        "partition",
        &["partition-balance", "degree-accounting", "crossing-soundness", "bezout-bound"],
    ),
    (
        "generators",
        &["seed-determinism", "planted-soundness", "st-grid-enumeration", "fstar-eliminant"],
    ),
];

#[test]
fn manifest_matches_documented_invariants() {
    let documented: BTreeSet<(&str, &str)> = DOCUMENTED
        .iter()
        .flat_map(|(m, ids)| ids.iter().map(move |id| (*m, *id)))
        .collect();
    let manifest: BTreeSet<(&str, &str)> = MANIFEST.iter().map(|(m, id, _)| (*m, *id)).collect();
    let missing: Vec<_> = documented.difference(&manifest).collect();
    let extra: Vec<_> = manifest.difference(&documented).collect();
    assert!(missing.is_empty(), "invariants without a check: {missing:?}");
    assert!(extra.is_empty(), "checks without a documented invariant: {extra:?}");
}

#[test]
fn only_throughput_is_soft() {
    let soft: Vec<&str> = MANIFEST.iter().filter(|(_, _, s)| *s).map(|(_, id, _)| *id).collect();
    assert_eq!(soft, ["throughput"]);
}

#[test]
fn every_check_runs_and_passes_at_small_scale() {
    let cfg = VerifyConfig {
        seed: 11,
        scale: 0.02,
        threads: Some(2),
    };
    for (module, id, _) in MANIFEST {
        let c = run_check(id, &cfg).expect("known id");
        assert_eq!(c.module, *module);
        assert!(c.trials > 0, "{id} ran no trials");
        assert!(c.passed(), "{id} failed: {c:?}");
    }
}

#[test]
fn checks_are_seed_deterministic() {
    let cfg = VerifyConfig {
        seed: 3,
        scale: 0.01,
        threads: None,
    };
    for id in ["master-duality", "triple-collinearity", "rich-planes-completeness"] {
        let a = run_check(id, &cfg).unwrap();
        let b = run_check(id, &cfg).unwrap();
        assert_eq!((a.trials, a.failures, &a.detail), (b.trials, b.failures, &b.detail));
    }
}
