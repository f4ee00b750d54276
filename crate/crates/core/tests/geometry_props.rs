use packcover::ellipse::{coverage_margin, enlarge, interiors_disjoint, point_location};
use packcover::inscription::{apex_chord_ratio, circumradius, mu, properly_inscribe, reference_polygon};
use packcover::{Contact, Ellipse, Location, Triangle, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ellipse_strategy() -> impl Strategy<Value = Ellipse> {
    (-3.0f64..3.0, -3.0f64..3.0, 0.1f64..2.0, 0.1f64..2.0, 0.0f64..std::f64::consts::PI)
        .prop_map(|(x, y, a, b, t)| Ellipse::new(Vec2::new(x, y), (a, b), t).unwrap())
}

fn triangle_strategy() -> impl Strategy<Value = Triangle> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_filter_map("non-degenerate", |(a, b, c, d, e, f)| {
            let v = [Vec2::new(a, b), Vec2::new(c, d), Vec2::new(e, f)];
            let t = Triangle::new(v, 0).ok()?;
            // Keep the shape reasonably conditioned.
            (t.area() > 0.05 * t.diameter().powi(2)).then_some(t)
        })
}

/// Searches for a point strictly inside both ellipses among 10^4 samples of
/// the first one's bounding box.
fn sampled_overlap(e1: &Ellipse, e2: &Ellipse, rng: &mut ChaCha8Rng) -> bool {
    let b = e1.bbox();
    (0..10_000).any(|_| {
        let p = Vec2::new(rng.gen_range(b.min.x..=b.max.x), rng.gen_range(b.min.y..=b.max.y));
        e1.to_unit(p).norm() < 1.0 && e2.to_unit(p).norm() < 1.0
    })
}

fn canonical_close(a: &Ellipse, b: &Ellipse, tol: f64) -> bool {
    let (x, y) = (a.canonical(), b.canonical());
    let dang = (x.angle - y.angle).abs();
    let dang = dang.min(std::f64::consts::PI - dang);
    let round = (x.semi_major - x.semi_minor).abs() < 1e-9 * x.semi_major;
    x.center.dist(y.center) < tol
        && (x.semi_major - y.semi_major).abs() < tol
        && (x.semi_minor - y.semi_minor).abs() < tol
        && (round || dang < 1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn enlarge_composes(e in ellipse_strategy(), l1 in 1.0f64..3.0, l2 in 1.0f64..3.0) {
        let twice = enlarge(&enlarge(&e, l1).unwrap(), l2).unwrap();
        let once = enlarge(&e, l1 * l2).unwrap();
        prop_assert!(canonical_close(&twice, &once, 1e-12 * (1.0 + once.diameter())));
    }

    #[test]
    fn disjointness_is_symmetric(a in ellipse_strategy(), b in ellipse_strategy()) {
        prop_assert_eq!(interiors_disjoint(&a, &b, 1e-9), interiors_disjoint(&b, &a, 1e-9));
    }

    #[test]
    fn enlargement_is_monotone(e in ellipse_strategy(), l in 1.000001f64..2.0, x in -6.0f64..6.0, y in -6.0f64..6.0) {
        let p = Vec2::new(x, y);
        let big = enlarge(&e, l).unwrap();
        if point_location(&e, p, 0.0) != Location::Exterior {
            prop_assert_eq!(point_location(&big, p, 0.0), Location::Interior);
        }
    }

    #[test]
    fn admissible_enlargement_covers_the_tile(t in triangle_strategy(), n in 2usize..9, slack in 1e-6f64..0.5) {
        let spec = reference_polygon(n).unwrap();
        let tile = properly_inscribe(&t, &spec).unwrap();
        let big = tile.ellipse.enlarge(circumradius(n) * (1.0 + slack)).unwrap();
        prop_assert!(coverage_margin(&big, &tile.polygon) > 0.0);
    }
}

#[test]
fn disjointness_agrees_with_sampling_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut disagreements = 0;
    let mut overlaps = 0;
    for _ in 0..1000 {
        let mut random = || {
            Ellipse::new(
                Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                (rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5)),
                rng.gen_range(0.0..std::f64::consts::PI),
            )
            .unwrap()
        };
        let (a, b) = (random(), random());
        let contact = interiors_disjoint(&a, &b, 1e-9);
        let scale = a.contact_scale(&b);
        let seen = sampled_overlap(&a, &b, &mut rng);
        if contact == Contact::Overlap {
            overlaps += 1;
        }
        // A witness inside both always forbids a packable verdict; a clear
        // overlap (scaling down by 10% still intersects) must produce a witness.
        if (seen && contact.is_packable()) || (scale < 0.9 && !seen) {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
    assert!(overlaps > 100 && overlaps < 900, "{overlaps}");
}

#[test]
fn inscribed_polygon_geometry_on_random_triangles() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [2, 3, 4, 6, 9] {
        let spec = reference_polygon(n).unwrap();
        for _ in 0..50 {
            let v = [(); 3].map(|_| Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let Ok(t) = Triangle::new(v, rng.gen_range(0..3)) else { continue };
            if t.area() < 0.05 * t.diameter().powi(2) {
                continue;
            }
            let tile = properly_inscribe(&t, &spec).unwrap();
            let h = t.height();
            let verts = tile.polygon.vertices();
            let apex_idx = verts.iter().position(|p| p.dist(t.apex()) < 1e-9 * t.diameter()).unwrap();
            let m = verts.len();
            let (l, r) = (verts[(apex_idx + m - 1) % m], verts[(apex_idx + 1) % m]);

            // The apex cap cut off by the chord through the two apex-adjacent vertices.
            let chord = (r - l).normalized();
            let cap = (t.apex() - l).cross(chord).abs();
            assert!((cap / h - apex_chord_ratio(n)).abs() < 1e-10 * apex_chord_ratio(n).max(1.0));
            assert!((apex_chord_ratio(n) - (1.0 - (std::f64::consts::PI / n as f64).cos()) / 2.0).abs() < 1e-15);

            // Every non-apex vertex sits at most mu*h above the base; the two
            // neighbours of the apex attain it.
            for (i, p) in verts.iter().enumerate() {
                if i == apex_idx {
                    continue;
                }
                let y = t.height_of(*p);
                assert!(y <= mu(n) * h * (1.0 + 1e-10) + 1e-12);
                let adjacent = i == (apex_idx + 1) % m || (i + 1) % m == apex_idx;
                assert_eq!(adjacent, (y - mu(n) * h).abs() < 1e-9 * h, "n={n} vertex {i}");
            }

            // Tangent to every edge: the support value along each outward
            // normal equals the edge line's offset.
            for (a, b) in tile.polygon.edges() {
                let normal = -(b - a).perp().normalized();
                let gap = tile.ellipse.support(normal) - normal.dot(a);
                assert!(gap.abs() < 1e-10 * t.diameter(), "gap {gap}");
            }

            // The first admissible lambda for this n covers the tile.
            let lambda = circumradius(n) * (1.0 + 1e-3);
            assert!(coverage_margin(&tile.ellipse.enlarge(lambda).unwrap(), &tile.polygon) > 0.0);
        }
    }
}
