use packcover::inscription::{mu, reference_polygon};
use packcover::tiler::{forecast_tile_count, tile_until, TilingState};
use packcover::{Triangle, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_triangle(rng: &mut ChaCha8Rng) -> Triangle {
    loop {
        let v = [(); 3].map(|_| Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)));
        if let Ok(t) = Triangle::new(v, rng.gen_range(0..3)) {
            if t.area() > 0.05 * t.diameter().powi(2) {
                return t;
            }
        }
    }
}

/// Smallest threshold of the form `0.99 h · 0.83^k` whose forecast stays
/// under `cap` tiles. The factor is not dyadic: for n = 2 pocket heights are
/// exact halvings and would tie with δ.
fn affordable_delta(n: usize, h: f64, cap: u128) -> f64 {
    let mut delta = 0.99 * h;
    while forecast_tile_count(n, h, 0.83 * delta) <= cap {
        delta *= 0.83;
    }
    delta
}

#[test]
fn area_disjointness_and_residual_strip() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for trial in 0..100 {
        let n = [2, 3, 4, 6][trial % 4];
        let spec = reference_polygon(n).unwrap();
        let t = random_triangle(&mut rng);
        let delta = affordable_delta(n, t.height(), 400);
        let res = tile_until(&t, delta, &spec).unwrap();
        assert_eq!(res.tiles.len() as u128, forecast_tile_count(n, t.height(), delta));

        let total: f64 = res.tiles.iter().map(|p| p.polygon.area()).sum::<f64>()
            + res.residual.iter().map(|r| r.area()).sum::<f64>();
        assert!((total - t.area()).abs() <= 1e-9 * t.area(), "trial {trial}: {total} vs {}", t.area());

        let tol = 1e-10 * t.diameter();
        let boxes: Vec<_> = res.tiles.iter().map(|p| p.polygon.bbox()).collect();
        for (i, a) in res.tiles.iter().enumerate() {
            assert!(a.polygon.vertices().iter().all(|&p| t.contains(p, tol)));
            for (j, b) in res.tiles.iter().enumerate().skip(i + 1) {
                if boxes[i].intersects(&boxes[j]) {
                    assert!(!a.polygon.interiors_overlap(&b.polygon, tol), "trial {trial}: tiles {i},{j}");
                }
            }
        }
        for r in &res.residual {
            for p in r.v {
                let y = t.height_of(p);
                assert!(y >= -tol && y <= delta + tol, "trial {trial}: residual vertex at {y}");
            }
        }
    }
}

#[test]
fn greedy_order_decays_geometrically() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in [2, 3, 4, 6] {
        let spec = reference_polygon(n).unwrap();
        let t = random_triangle(&mut rng);
        let delta = affordable_delta(n, t.height(), 300);
        let mut state = TilingState::new(&t).unwrap();
        let mut last = state.y_max();
        while state.y_max() > delta {
            let y = state.y_max();
            // The apex-adjacent pockets sit exactly at mu * y; allow for rounding.
            let threshold = mu(n) * y * (1.0 + 1e-12);
            // Count of pending apexes above mu * y_i drops by exactly one per
            // step until it reaches zero.
            let mut count = state.pending_above(threshold);
            let start = state.step();
            while count > 0 {
                state.next_tile(&spec).unwrap();
                let now = state.pending_above(threshold);
                assert_eq!(now, count - 1, "n={n}");
                count = now;
                assert!(state.y_max() <= last + 1e-15);
                last = state.y_max();
            }
            assert!(state.y_max() <= threshold);
            assert!(state.step() > start);
        }
    }
}
