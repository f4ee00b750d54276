use packcover::ellipse::interiors_disjoint;
use packcover::verify::{verify_covering, verify_packing};
use packcover::{Aabb, Contact, Ellipse, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_ellipses(rng: &mut ChaCha8Rng, count: usize, extent: f64, max_axis: f64) -> Vec<Ellipse> {
    (0..count)
        .map(|_| {
            Ellipse::new(
                Vec2::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent)),
                (rng.gen_range(0.05..max_axis), rng.gen_range(0.05..max_axis)),
                rng.gen_range(0.0..std::f64::consts::PI),
            )
            .unwrap()
        })
        .collect()
}

fn all_pairs(ellipses: &[Ellipse], tol: f64) -> (Vec<(usize, usize)>, usize) {
    let mut overlapping = Vec::new();
    let mut tangent = 0;
    for i in 0..ellipses.len() {
        for j in i + 1..ellipses.len() {
            match interiors_disjoint(&ellipses[i], &ellipses[j], tol) {
                Contact::Overlap => overlapping.push((i, j)),
                Contact::Tangent => tangent += 1,
                Contact::Disjoint => {}
            }
        }
    }
    (overlapping, tangent)
}

#[test]
fn packing_check_matches_all_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for &(count, extent) in &[(10, 2.0), (60, 6.0), (200, 20.0), (500, 40.0), (500, 400.0)] {
        let es = random_ellipses(&mut rng, count, extent, 0.6);
        let report = verify_packing(&es, 1e-9);
        let mut got = report.overlapping.clone();
        got.sort_unstable();
        let (want, tangent) = all_pairs(&es, 1e-9);
        assert_eq!(got, want, "count {count}");
        assert_eq!(report.tangent_pairs, tangent);
        assert_eq!(report.ok, want.is_empty());
        assert_eq!(report, verify_packing(&es, 1e-9));
    }
}

#[test]
fn touching_discs_pass_and_nudged_discs_fail() {
    let row: Vec<Ellipse> = (0..20).map(|i| Ellipse::circle(Vec2::new(2.0 * i as f64, 0.0), 1.0).unwrap()).collect();
    let report = verify_packing(&row, 1e-9);
    assert!(report.ok);
    assert_eq!(report.tangent_pairs, 19);
    let mut nudged = row.clone();
    nudged[7] = Ellipse::circle(Vec2::new(14.0 - 1e-6, 0.0), 1.0).unwrap();
    assert_eq!(verify_packing(&nudged, 1e-9).overlapping, vec![(6, 7)]);
}

fn covered(enlarged: &[Ellipse], p: Vec2) -> bool {
    enlarged.iter().any(|e| e.to_unit(p).norm() <= 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every sample point outside all enlarged ellipses lies in a flagged
    /// cell, and a certified report has no uncovered samples at all.
    #[test]
    fn covering_check_is_conservative(seed in 0u64..1_000_000, lambda in 1.05f64..1.6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let es = random_ellipses(&mut rng, 40, 4.0, 0.7);
        let region = Aabb::new(Vec2::new(0.5, 0.5), Vec2::new(3.5, 3.5));
        let report = verify_covering(&es, lambda, region, 0.01).unwrap();
        let enlarged: Vec<Ellipse> = es.iter().map(|e| e.enlarge(lambda).unwrap()).collect();
        let k = 150;
        for j in 0..=k {
            for i in 0..=k {
                let p = Vec2::new(
                    region.min.x + region.width() * i as f64 / k as f64,
                    region.min.y + region.height() * j as f64 / k as f64,
                );
                if !covered(&enlarged, p) {
                    prop_assert!(!report.certified);
                    let inside = |b: &Aabb| b.min.x <= p.x && p.x <= b.max.x && b.min.y <= p.y && p.y <= b.max.y;
                    prop_assert!(report.uncovered_cells.iter().any(|c| inside(&c.cell)), "{p:?} not flagged");
                }
            }
        }
        prop_assert_eq!(report.certified, report.uncovered_cells.is_empty());
    }
}

#[test]
fn single_disc_covers_inscribed_square() {
    let disc = [Ellipse::circle(Vec2::ZERO, 1.0).unwrap()];
    let square = Aabb::new(Vec2::new(-0.7, -0.7), Vec2::new(0.7, 0.7));
    let report = verify_covering(&disc, 1.0 + 1e-3, square, 1e-3).unwrap();
    assert!(report.certified);
    let corner_out = Aabb::new(Vec2::new(-0.8, -0.8), Vec2::new(0.8, 0.8));
    let report = verify_covering(&disc, 1.0 + 1e-3, corner_out, 1e-3).unwrap();
    assert!(!report.certified);
    assert_eq!(report, verify_covering(&disc, 1.0 + 1e-3, corner_out, 1e-3).unwrap());
}

#[test]
fn near_tangent_gap_within_tolerance_counts_as_tangent() {
    let tol = 1e-6;
    let a = Ellipse::new(Vec2::ZERO, (1.0, 0.01), 0.3).unwrap();
    let n = Vec2::new(-(0.3f64).sin(), 0.3f64.cos());
    // Parallel copy separated by a gap of half the tolerance band.
    let b = a.translate(n * (0.02 * (1.0 + 0.5 * tol)));
    let report = verify_packing(&[a, b], tol);
    assert!(report.ok);
    assert_eq!(report.tangent_pairs, 1);
}
