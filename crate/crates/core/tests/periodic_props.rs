use packcover::io::PackingFile;
use packcover::periodic::{build_cell, build_up_pattern, lattice_basis, PackingConfig};
use packcover::verify::{verify_covering, verify_packing};
use packcover::{Aabb, Vec2};

#[test]
fn residual_triangles_lie_in_the_enlarged_initial_ellipse() {
    let cfg = PackingConfig::new(1.5);
    let up = build_up_pattern(&cfg).unwrap();
    let big = up.initial.ellipse.enlarge(cfg.lambda).unwrap();
    assert_eq!(up.fans.len(), 2 * up.spec.n - 2);
    let mut residuals = 0;
    for fan in &up.fans {
        for r in &fan.tiling.residual {
            residuals += 1;
            for p in r.v {
                assert!(big.to_unit(p).norm() < 1.0);
            }
        }
    }
    assert!(residuals > 0);
}

#[test]
fn cell_is_a_nondegenerate_periodic_packing() {
    let p = build_cell(&PackingConfig::new(1.5)).unwrap();
    for e in p.ellipses() {
        let (_, b) = e.semi_axes();
        assert!(b >= 1e-9);
        assert!(e.diameter() <= p.triangle_side * (1.0 + 1e-12));
    }
    assert!(verify_packing(&p.with_neighbors(), 1e-9).ok);

    // Translates are built by adding the lattice vector to each center.
    for (i, j) in [(1, 0), (0, 1), (-1, 1), (3, -2)] {
        let t = p.lattice_vector(i, j);
        for (a, b) in p.ellipses().zip(p.translated(i, j)) {
            assert_eq!(b.center(), a.center() + t);
            assert_eq!(b.map().linear, a.map().linear);
        }
    }
    assert_eq!(p.lattice, lattice_basis(1.0));
}

#[test]
fn enlarged_cell_covers_its_fundamental_domain() {
    let p = build_cell(&PackingConfig::new(1.5)).unwrap();
    let all = p.with_neighbors();
    let region = Aabb::new(Vec2::ZERO, Vec2::new(1.0, 3f64.sqrt() / 2.0));
    let report = verify_covering(&all, p.lambda, region, 1e-4).unwrap();
    assert!(report.certified, "{} flagged cells", report.uncovered_cells.len());
    // Slightly less enlargement than the construction assumes leaves gaps.
    let report = verify_covering(&all, 1.0 + 0.5 * (p.lambda - 1.0), region, 1e-4).unwrap();
    assert!(!report.certified);
}

#[test]
fn construction_is_deterministic() {
    let a = PackingFile::from_packing(&build_cell(&PackingConfig::new(1.5)).unwrap()).to_json();
    let b = PackingFile::from_packing(&build_cell(&PackingConfig::new(1.5)).unwrap()).to_json();
    assert_eq!(a, b);
}
