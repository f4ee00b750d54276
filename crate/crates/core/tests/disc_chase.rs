use std::sync::OnceLock;

use packcover::disc::{
    audit_constants, brute_force_uncovered, calibrate, chase, random_greedy_packing, CaseLabel, ChaseTrace, Constants,
    DiscPacking, OrientedSquare, RandomPackingParams,
};
use packcover::{Aabb, Disc, Vec2};

fn constants() -> Constants {
    static K: OnceLock<Constants> = OnceLock::new();
    *K.get_or_init(|| calibrate(&Constants::default_base()).unwrap().constants)
}

fn start() -> OrientedSquare {
    OrientedSquare { center: Vec2::ZERO, half_side: 2.0, angle: 0.0 }
}

fn assert_shrinks(trace: &ChaseTrace) {
    let r: Vec<f64> = trace.regions.iter().map(|g| g.r()).collect();
    for k in 0..r.len().saturating_sub(2) {
        assert!(r[k + 2] <= 0.5 * r[k] * (1.0 + 1e-12), "{r:?}");
    }
}

#[test]
fn chase_certifies_points_on_random_packings() {
    let k = constants();
    for seed in 0..25 {
        let p = random_greedy_packing(seed, &RandomPackingParams::default()).unwrap();
        p.validate(1e-12).unwrap();
        let out = chase(&p, start(), &k).unwrap();
        assert!(p.discs.iter().all(|d| d.center.dist(out.point) > (1.0 + k.eps) * d.radius));
        assert!(start().contains(out.point, 1e-12));
        assert_eq!(out.trace.cases.last(), Some(&CaseLabel::Uncovered));
        assert_eq!(out.trace.regions.len(), out.trace.cases.len());
        assert_shrinks(&out.trace);
    }
}

#[test]
fn chase_agrees_with_brute_force_on_a_unit_disc() {
    let k = constants();
    let p = DiscPacking::new(vec![Disc { center: Vec2::ZERO, radius: 1.0 }]);
    let out = chase(&p, start(), &k).unwrap();
    assert!(out.point.norm() > 1.0 + k.eps);
    let region = Aabb::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0));
    let witness = brute_force_uncovered(&p, k.eps, &region, 0.05).unwrap().unwrap();
    assert!(witness.norm() > 1.0 + k.eps);
}

#[test]
fn chase_enters_a_crescent_next_to_a_large_disc() {
    let k = constants();
    // A unit disc just off the square's center forces the crescent route.
    let p = DiscPacking::new(vec![
        Disc { center: Vec2::new(0.3, 0.1), radius: 1.0 },
        Disc { center: Vec2::new(-1.5, 1.5), radius: 0.4 },
    ]);
    let out = chase(&p, start(), &k).unwrap();
    assert!(out.trace.cases.contains(&CaseLabel::SquareB));
    assert!(p.is_uncovered(out.point, k.eps));
    assert_shrinks(&out.trace);
}

#[test]
fn trace_serializes_with_case_labels() {
    let k = constants();
    let p = random_greedy_packing(5, &RandomPackingParams::default()).unwrap();
    let out = chase(&p, start(), &k).unwrap();
    let text = serde_json::to_string(&out).unwrap();
    assert!(text.contains("\"uncovered\""));
    let back: packcover::disc::ChaseOutcome = serde_json::from_str(&text).unwrap();
    assert_eq!(back, out);
}

#[test]
fn audit_reproduces_the_printed_chain() {
    let k = constants();
    let report = audit_constants(&k);
    assert!(report.pass, "{:?}", report.failing());
    let a = report.check("A").unwrap().value;
    let b = report.check("B").unwrap().value;
    assert_eq!(format!("{a:.3}"), "1.055");
    assert_eq!(format!("{b:.6}"), "1.000021");
    assert!(report.check("A.sqrt").unwrap().value < 1.03);
    let text = serde_json::to_string(&report).unwrap();
    assert!(text.contains("\"id\":\"E.cap\""));
}
