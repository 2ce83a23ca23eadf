//! On-disk record shapes.

use serde_json::json;

use incidence_core::engine::{count, CountOptions, Instance, IncidenceReport};
use incidence_core::generators::{gen, GenKind, GenSpec, Generated};
use incidence_core::kernel::{Q, rat};

#[test]
fn rationals_are_canonical_strings() {
    assert_eq!(serde_json::to_value(Q(rat(6, -4))).unwrap(), json!("-3/2"));
    assert_eq!(serde_json::to_value(Q(rat(4, 2))).unwrap(), json!("2"));
    assert!(serde_json::from_value::<Q>(json!("1/0")).is_err());
    assert!(serde_json::from_value::<Q>(json!("x")).is_err());
    assert_eq!(serde_json::from_value::<Q>(json!("10/4")).unwrap().0, rat(5, 2));
}

#[test]
fn directed_point_instance_shape() {
    let doc = json!({
        "points": {"kind": "directed", "items": [{"p": ["0", "0"], "u": "0"}]},
        "curves": {"kind": "circles", "items": [{"c": ["0", "1"], "r2": "1"}, {"c": ["1", "0"], "r2": "1"}]}
    });
    let inst: Instance = serde_json::from_value(doc.clone()).unwrap();
    let rep = count(&inst, &CountOptions::exact()).unwrap();
    assert_eq!(rep.total, 1);
    assert_eq!(rep.per_curve, vec![1, 0]);
    assert_eq!(serde_json::to_value(&inst).unwrap(), doc);
}

#[test]
fn invalid_records_are_rejected() {
    let bad_radius = json!({
        "points": {"kind": "directed", "items": []},
        "curves": {"kind": "circles", "items": [{"c": ["0", "0"], "r2": "-1"}]}
    });
    assert!(serde_json::from_value::<Instance>(bad_radius).is_err());
    let bad_anchor = json!({
        "points": {"kind": "space", "items": []},
        "curves": {"kind": "anchored", "items": [{"c": ["1", "1", "0"], "n": ["0", "0", "1"]}]}
    });
    assert!(serde_json::from_value::<Instance>(bad_anchor).is_err());
    let unknown = json!({"kind": "pencil", "m": 1, "n": 1, "colour": 3});
    assert!(serde_json::from_value::<GenSpec>(unknown).is_err());
}

#[test]
fn generated_documents_round_trip() {
    for kind in GenKind::ALL {
        let g = gen(&GenSpec::new(kind, 12, 15, 9)).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        let back: Generated = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }
}

#[test]
fn report_json_hides_histograms_on_request() {
    let g = gen(&GenSpec::new(GenKind::Pencil, 3, 6, 1)).unwrap();
    let rep = count(&g.instance, &CountOptions::exact()).unwrap();
    let full = rep.to_json(true);
    let slim = rep.to_json(false);
    assert!(full.get("per_point").is_some());
    assert!(slim.get("per_point").is_none());
    assert_eq!(slim["total"], json!(6));
    assert_eq!(IncidenceReport::CSV_HEADER, ["m", "n", "total", "mode", "seconds"]);
}
