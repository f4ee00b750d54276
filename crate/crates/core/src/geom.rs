//! Planar primitives: vectors, affine maps, triangles and convex polygons.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Determinant / area threshold below which a map or triangle is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point2 = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Vec2::new(radius * angle.cos(), radius * angle.sin())
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    #[inline]
    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    #[inline]
    pub fn midpoint(self, o: Vec2) -> Vec2 {
        Vec2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { m: [[1.0, 0.0], [0.0, 1.0]] };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    /// Matrix whose columns are `c0` and `c1`.
    pub fn from_cols(c0: Vec2, c1: Vec2) -> Self {
        Mat2::new(c0.x, c1.x, c0.y, c1.y)
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, b)
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn col(&self, j: usize) -> Vec2 {
        Vec2::new(self.m[0][j], self.m[1][j])
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2::new(self.m[0][0] * s, self.m[0][1] * s, self.m[1][0] * s, self.m[1][1] * s)
    }

    /// Singular values `(max, min)`.
    pub fn singular_values(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.m;
        // Eigenvalues of M M^T.
        let p = a * a + b * b;
        let s = c * c + d * d;
        let q = a * c + b * d;
        let half_tr = 0.5 * (p + s);
        let rad = (0.25 * (p - s) * (p - s) + q * q).sqrt();
        let smax = (half_tr + rad).sqrt();
        let smin = if smax > 0.0 { self.det().abs() / smax } else { 0.0 };
        (smax, smin)
    }
}

/// `x -> linear * x + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap2 {
    pub linear: Mat2,
    pub translation: Vec2,
}

impl AffineMap2 {
    pub const IDENTITY: AffineMap2 = AffineMap2 {
        linear: Mat2::IDENTITY,
        translation: Vec2::ZERO,
    };

    /// Fails when the linear part is singular.
    pub fn new(linear: Mat2, translation: Vec2) -> Result<Self> {
        let det = linear.det();
        if !det.is_finite() || det.abs() <= DEGENERACY_TOL {
            return Err(Error::InvalidArgument(format!(
                "affine map with near-singular linear part (det = {det:e})"
            )));
        }
        Ok(AffineMap2 { linear, translation })
    }

    pub fn translation(t: Vec2) -> Self {
        AffineMap2 {
            linear: Mat2::IDENTITY,
            translation: t,
        }
    }

    /// Half-turn about `center`.
    pub fn half_turn(center: Vec2) -> Self {
        AffineMap2 {
            linear: Mat2::diag(-1.0, -1.0),
            translation: center * 2.0,
        }
    }

    /// The unique affine map with `src[i] -> dst[i]`.
    pub fn from_triangles(src: [Point2; 3], dst: [Point2; 3]) -> Result<Self> {
        let s = Mat2::from_cols(src[1] - src[0], src[2] - src[0]);
        let d = Mat2::from_cols(dst[1] - dst[0], dst[2] - dst[0]);
        let s_inv = s.inverse().ok_or_else(|| {
            Error::InvalidArgument("source triangle is degenerate".into())
        })?;
        let linear = d.mul(&s_inv);
        let translation = dst[0] - linear.apply(src[0]);
        // Scale-relative check: the triangles were validated by their own
        // constructors, only an exactly flat target is rejected here.
        let det = linear.det();
        if !det.is_finite() || det == 0.0 {
            return Err(Error::InvalidArgument("target triangle is degenerate".into()));
        }
        Ok(AffineMap2 { linear, translation })
    }

    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        self.linear.apply(p) + self.translation
    }

    pub fn det(&self) -> f64 {
        self.linear.det()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        AffineMap2 {
            linear: self.linear.mul(&inner.linear),
            translation: self.linear.apply(inner.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Result<AffineMap2> {
        let inv = self
            .linear
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("affine map is not invertible".into()))?;
        Ok(AffineMap2 {
            linear: inv,
            translation: -inv.apply(self.translation),
        })
    }
}

/// Triangle with counterclockwise vertices and one side designated as its base.
///
/// Side `k` joins vertex `k` to vertex `k + 1 (mod 3)`; the apex is the vertex
/// opposite the base, i.e. vertex `k + 2 (mod 3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub v: [Point2; 3],
    pub base: usize,
}

impl Triangle {
    /// Builds a triangle from `base_start`, `base_end`, `apex`. The apex must
    /// lie to the left of the directed base.
    pub fn with_base(base_start: Point2, base_end: Point2, apex: Point2) -> Result<Self> {
        Triangle::new([base_start, base_end, apex], 0)
    }

    pub fn new(v: [Point2; 3], base: usize) -> Result<Self> {
        if base > 2 {
            return Err(Error::InvalidArgument(format!("base index {base} out of range")));
        }
        if !v.iter().all(|p| p.is_finite()) {
            return Err(Error::InvalidArgument("non-finite triangle vertex".into()));
        }
        let t = Triangle { v, base };
        let area = t.signed_area();
        if !(area > DEGENERACY_TOL * t.diameter().powi(2)) {
            return Err(Error::InvalidArgument(format!(
                "triangle is degenerate or clockwise (signed area {area:e})"
            )));
        }
        Ok(t)
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * (self.v[1] - self.v[0]).cross(self.v[2] - self.v[0])
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn base_start(&self) -> Point2 {
        self.v[self.base]
    }

    pub fn base_end(&self) -> Point2 {
        self.v[(self.base + 1) % 3]
    }

    pub fn apex(&self) -> Point2 {
        self.v[(self.base + 2) % 3]
    }

    pub fn base_midpoint(&self) -> Point2 {
        self.base_start().midpoint(self.base_end())
    }

    /// Vertices in `(base_start, base_end, apex)` order.
    pub fn ordered(&self) -> [Point2; 3] {
        [self.base_start(), self.base_end(), self.apex()]
    }

    pub fn base_length(&self) -> f64 {
        self.base_start().dist(self.base_end())
    }

    /// Distance from the apex to the base line.
    pub fn height(&self) -> f64 {
        2.0 * self.area() / self.base_length()
    }

    pub fn diameter(&self) -> f64 {
        let [a, b, c] = self.v;
        a.dist(b).max(b.dist(c)).max(c.dist(a))
    }

    /// Rigid motion taking the base start to the origin and the base onto the
    /// positive x-axis, so the apex lands in the upper half-plane.
    pub fn base_frame(&self) -> AffineMap2 {
        let p = self.base_start();
        let dir = (self.base_end() - p).normalized();
        let rot = Mat2::new(dir.x, dir.y, -dir.y, dir.x);
        AffineMap2 {
            linear: rot,
            translation: -rot.apply(p),
        }
    }

    /// Signed distance of `p` above the base line (positive on the apex side).
    pub fn height_of(&self, p: Point2) -> f64 {
        let a = self.base_start();
        let d = self.base_end() - a;
        d.cross(p - a) / d.norm()
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        (0..3).all(|k| {
            let a = self.v[k];
            let b = self.v[(k + 1) % 3];
            let e = b - a;
            e.cross(p - a) >= -tol * e.norm()
        })
    }

    pub fn map(&self, f: &AffineMap2) -> Triangle {
        Triangle {
            v: [f.apply(self.v[0]), f.apply(self.v[1]), f.apply(self.v[2])],
            base: self.base,
        }
    }

    pub fn centroid(&self) -> Point2 {
        (self.v[0] + self.v[1] + self.v[2]) / 3.0
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon {
            vertices: self.v.to_vec(),
        }
    }
}

/// Strictly convex polygon, vertices counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "a convex polygon needs at least 3 vertices, got {n}"
            )));
        }
        let scale = bbox_of(&vertices).diagonal().max(f64::MIN_POSITIVE);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let turn = (b - a).cross(c - b);
            if !(turn > DEGENERACY_TOL * scale * scale * 1e-6) {
                return Err(Error::InvalidArgument(format!(
                    "polygon is not strictly convex at vertex {} (turn {turn:e})",
                    (i + 1) % n
                )));
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(b)).sum::<f64>()
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            e.cross(p - a) >= -tol * e.norm()
        })
    }

    pub fn map(&self, f: &AffineMap2) -> ConvexPolygon {
        let mut vertices: Vec<Point2> = self.vertices.iter().map(|&p| f.apply(p)).collect();
        if f.det() < 0.0 {
            vertices.reverse();
        }
        ConvexPolygon { vertices }
    }

    pub fn bbox(&self) -> Aabb {
        bbox_of(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    /// Separating-axis test. Returns true when the interiors overlap by more
    /// than `tol` along every edge normal of both polygons.
    pub fn interiors_overlap(&self, other: &ConvexPolygon, tol: f64) -> bool {
        // The outward normal of a CCW edge (p, q) is -perp(q - p).
        fn separated(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
            a.edges().any(|(p, q)| {
                let n = -(q - p).perp().normalized();
                let offset = n.dot(p);
                b.vertices.iter().all(|&v| n.dot(v) - offset >= -tol)
            })
        }
        !(separated(self, other, tol) || separated(other, self, tol))
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn new(min: Point2, max: Point2) -> Self {
        Aabb { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    pub fn contains_box(&self, o: &Aabb) -> bool {
        self.min.x <= o.min.x && self.min.y <= o.min.y && o.max.x <= self.max.x && o.max.y <= self.max.y
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb::new(
            Vec2::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            Vec2::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        )
    }

    pub fn translate(&self, t: Vec2) -> Aabb {
        Aabb::new(self.min + t, self.max + t)
    }
}

pub fn bbox_of(points: &[Point2]) -> Aabb {
    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    Aabb::new(min, max)
}

/// Intersection of the line through `p0, p1` with the line through `q0, q1`.
pub fn line_intersection(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> Option<Point2> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    if denom.abs() <= f64::EPSILON * r.norm() * s.norm() {
        return None;
    }
    let t = (q0 - p0).cross(s) / denom;
    Some(p0 + r * t)
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}
