//! The regular 2n-gon circumscribed about the unit disc, and its affine copies
//! properly inscribed in triangles.

use std::f64::consts::PI;

use crate::ellipse::Ellipse;
use crate::error::{Error, Result};
use crate::geom::{line_intersection, AffineMap2, ConvexPolygon, Point2, Triangle, Vec2};

/// Relative tolerance for the post-hoc inscription checks.
pub const INSCRIPTION_TOL: f64 = 1e-10;

/// Least `n >= 2` whose circumscribed 2n-gon fits inside the λ-enlarged disc.
pub fn choose_n(lambda: f64) -> Result<usize> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must exceed 1, got {lambda}")));
    }
    let mut n = 2usize;
    while circumradius(n) >= lambda {
        n += 1;
        if n > 1 << 24 {
            return Err(Error::InvalidArgument(format!("lambda {lambda} is too close to 1")));
        }
    }
    Ok(n)
}

/// `sec(π / 2n)`.
pub fn circumradius(n: usize) -> f64 {
    1.0 / (PI / (2.0 * n as f64)).cos()
}

/// `(1 + cos(π/n)) / 2`: height fraction of the two apex-adjacent vertices.
pub fn mu(n: usize) -> f64 {
    0.5 * (1.0 + (PI / n as f64).cos())
}

/// `(1 - cos(π/n)) / 2`: apex-to-chord distance over triangle height.
pub fn apex_chord_ratio(n: usize) -> f64 {
    0.5 * (1.0 - (PI / n as f64).cos())
}

/// Height of vertex `k` above the base, as a fraction of the triangle height.
pub fn vertex_height_fraction(n: usize, k: usize) -> f64 {
    0.5 * (1.0 + (k as f64 * PI / n as f64).cos())
}

/// `P` in its reference position together with the triangle it is properly
/// inscribed in.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularGonSpec {
    pub n: usize,
    pub polygon: ConvexPolygon,
    pub reference_triangle: Triangle,
}

impl RegularGonSpec {
    pub fn vertices(&self) -> &[Point2] {
        self.polygon.vertices()
    }

    pub fn v_plus(&self) -> Point2 {
        self.vertices()[0]
    }

    pub fn v_minus(&self) -> Point2 {
        self.vertices()[self.n]
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.n
    }
}

pub fn reference_polygon(n: usize) -> Result<RegularGonSpec> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let s = circumradius(n);
    let m = 2 * n;
    let vertices: Vec<Point2> = (0..m)
        .map(|k| {
            let theta = PI / 2.0 + k as f64 * PI / n as f64;
            Vec2::new(s * theta.cos(), s * theta.sin())
        })
        .collect();
    let top = vertices[0];
    let (bl, br) = (Vec2::new(-1.0, -s), Vec2::new(1.0, -s));
    let left = line_intersection(top, vertices[1], bl, br)
        .ok_or_else(|| Error::Internal("apex edge parallel to base".into()))?;
    let right = line_intersection(top, vertices[m - 1], bl, br)
        .ok_or_else(|| Error::Internal("apex edge parallel to base".into()))?;
    // Snap to the exact mirror pair so the configuration stays symmetric.
    let xb = 0.5 * (right.x - left.x);
    let reference_triangle = Triangle::with_base(Vec2::new(-xb, -s), Vec2::new(xb, -s), top)?;
    Ok(RegularGonSpec {
        n,
        polygon: ConvexPolygon::new(vertices)?,
        reference_triangle,
    })
}

/// An affine copy of `P` properly inscribed in `source`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperTile {
    pub polygon: ConvexPolygon,
    pub ellipse: Ellipse,
    pub source: Triangle,
    pub map: AffineMap2,
}

/// The map sending the reference triangle onto `t` (base to base, apex to apex).
pub fn inscription_map(t: &Triangle, spec: &RegularGonSpec) -> Result<AffineMap2> {
    AffineMap2::from_triangles(spec.reference_triangle.ordered(), t.ordered())
}

pub fn properly_inscribe(t: &Triangle, spec: &RegularGonSpec) -> Result<ProperTile> {
    let map = inscription_map(t, spec)?;
    let tile = ProperTile {
        polygon: spec.polygon.map(&map),
        ellipse: Ellipse::from_map(map)?,
        source: *t,
        map,
    };
    check_proper(&tile, spec)?;
    Ok(tile)
}

/// Asserts conditions (containment, apex/base-midpoint correspondence, apex
/// angle) and tangency of the ellipse to every edge.
pub fn check_proper(tile: &ProperTile, spec: &RegularGonSpec) -> Result<()> {
    let t = &tile.source;
    let tol = INSCRIPTION_TOL * t.diameter();
    let verts = tile.polygon.vertices();
    let fail = |what: &str| Err(Error::Internal(format!("inscription violated: {what}")));

    if !verts.iter().all(|&p| t.contains(p, tol)) {
        return fail("tile not contained in triangle");
    }
    if verts[0].dist(t.apex()) > tol {
        return fail("top vertex is not the apex");
    }
    if verts[spec.n].dist(t.base_midpoint()) > tol {
        return fail("bottom vertex is not the base midpoint");
    }
    // Apex-adjacent vertices on the two non-base sides.
    let left_side = (t.apex(), t.base_start());
    let right_side = (t.base_end(), t.apex());
    let on_line = |p: Point2, (a, b): (Point2, Point2)| {
        let d = b - a;
        (d.cross(p - a) / d.norm()).abs() <= tol
    };
    if !on_line(verts[1], left_side) || !on_line(verts[2 * spec.n - 1], right_side) {
        return fail("apex angle differs from the triangle's");
    }
    for (p, q) in tile.polygon.edges() {
        let outward = (q - p).perp() * -1.0;
        let outward = outward.normalized();
        let gap = outward.dot(p) - tile.ellipse.support(outward);
        if gap.abs() > tol {
            return fail("ellipse not tangent to an edge");
        }
    }
    Ok(())
}
