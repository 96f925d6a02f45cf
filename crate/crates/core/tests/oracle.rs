use logjet::logmodel::MonomialLogScheme;
use logjet::monoid::AffineMonoid;
use logjet::oracle::{
    closed_form_count, enumerate_log_jet_points, enumerate_log_jets, is_ordinary_jet, DEFAULT_BUDGET,
};

#[test]
fn counts_multiply_over_sums() {
    let line = AffineMonoid::free(&["x"]);
    let plane = AffineMonoid::free(&["x", "y"]);
    for q in [2, 3, 5] {
        for m in 0..=2 {
            let a = enumerate_log_jets(&line, q, m, DEFAULT_BUDGET).unwrap().count;
            let b = enumerate_log_jets(&plane, q, m, DEFAULT_BUDGET).unwrap().count;
            assert_eq!(b, a * a, "q={q} m={m}");
        }
    }
}

#[test]
fn order_zero_counts_points() {
    let cusp = AffineMonoid::parse(&["x", "y"], &["3x = 2y"]).unwrap();
    for q in [2, 3, 5] {
        let points = (0..q).count() as u64;
        assert_eq!(enumerate_log_jets(&cusp, q, 0, DEFAULT_BUDGET).unwrap().count, points);
        let s = MonomialLogScheme::standard(cusp.clone(), 0).unwrap();
        assert_eq!(closed_form_count(&s, q, 0, DEFAULT_BUDGET).unwrap().count, points);
    }
}

#[test]
fn log_jets_determine_ordinary_jets() {
    let two = AffineMonoid::parse(&["x", "y"], &["2x = 2y"]).unwrap();
    for pt in enumerate_log_jet_points(&two, 3, 2, DEFAULT_BUDGET).unwrap() {
        assert!(is_ordinary_jet(&two, &pt.ordinary));
    }
}

#[test]
fn plane_standard_matches_closed_form() {
    let plane = AffineMonoid::free(&["x", "y"]);
    let s = MonomialLogScheme::standard(plane.clone(), 0).unwrap();
    let e = enumerate_log_jets(&plane, 2, 1, DEFAULT_BUDGET).unwrap();
    let c = closed_form_count(&s, 2, 1, DEFAULT_BUDGET).unwrap();
    assert_eq!((e.count, c.count), (16, 16));
    assert_eq!(serde_json::to_value(&e).unwrap()["method"], "enumeration");
}
