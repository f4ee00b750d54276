use serde::{Deserialize, Serialize};

use crate::geom::{segment_distance, Point2, Vec2};

/// `a - b` wrapped to `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Square of side `2 * half_side`, rotated by `angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedSquare {
    pub center: Point2,
    pub half_side: f64,
    pub angle: f64,
}

impl OrientedSquare {
    fn local(&self, p: Point2) -> Vec2 {
        (p - self.center).rotate(-self.angle)
    }

    pub fn distance(&self, p: Point2) -> f64 {
        let q = self.local(p);
        let dx = (q.x.abs() - self.half_side).max(0.0);
        let dy = (q.y.abs() - self.half_side).max(0.0);
        dx.hypot(dy)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let q = self.local(p);
        q.x.abs() <= self.half_side + tol && q.y.abs() <= self.half_side + tol
    }

    pub fn corners(&self) -> [Point2; 4] {
        let h = self.half_side;
        [(-h, -h), (h, -h), (h, h), (-h, h)]
            .map(|(x, y)| self.center + Vec2::new(x, y).rotate(self.angle))
    }

    /// `per_side` points on each side, corners included.
    pub fn boundary_samples(&self, per_side: usize) -> Vec<Point2> {
        let c = self.corners();
        let mut out = Vec::with_capacity(4 * per_side);
        for k in 0..4 {
            let (a, b) = (c[k], c[(k + 1) % 4]);
            for i in 0..per_side {
                out.push(a.lerp(b, i as f64 / per_side as f64));
            }
        }
        out
    }
}

/// Annular sector `{ r_in <= |p - center| <= r_out, |arg(p - center) - axis| <= half_width }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub center: Point2,
    pub r_in: f64,
    pub r_out: f64,
    pub axis: f64,
    pub half_width: f64,
}

impl Sector {
    fn unit(angle: f64) -> Vec2 {
        Vec2::new(angle.cos(), angle.sin())
    }

    /// Exact Euclidean distance (requires `half_width < π/2`).
    pub fn distance(&self, p: Point2) -> f64 {
        let v = p - self.center;
        let d = v.norm();
        if d == 0.0 {
            return self.r_in;
        }
        if angle_diff(v.angle(), self.axis).abs() <= self.half_width {
            return (self.r_in - d).max(d - self.r_out).max(0.0);
        }
        // Outside the wedge the nearest point lies on a radial edge.
        [self.axis - self.half_width, self.axis + self.half_width]
            .iter()
            .map(|&t| {
                let u = Self::unit(t);
                segment_distance(p, self.center + u * self.r_in, self.center + u * self.r_out)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let v = p - self.center;
        let d = v.norm();
        if d < self.r_in - tol || d > self.r_out + tol {
            return false;
        }
        let ang_tol = if d > 0.0 { tol / d } else { f64::INFINITY };
        angle_diff(v.angle(), self.axis).abs() <= self.half_width + ang_tol
    }

    pub fn point_at(&self, radius: f64, angle_offset: f64) -> Point2 {
        self.center + Self::unit(self.axis + angle_offset) * radius
    }

    /// The point on the axis halfway between the two arcs.
    pub fn midpoint(&self) -> Point2 {
        self.point_at(0.5 * (self.r_in + self.r_out), 0.0)
    }

    /// `per_side` points on each of the four boundary pieces, corners included.
    pub fn boundary_samples(&self, per_side: usize) -> Vec<Point2> {
        let h = self.half_width;
        let mut out = Vec::with_capacity(4 * per_side);
        for i in 0..per_side {
            let t = i as f64 / per_side as f64;
            out.push(self.point_at(self.r_in, -h + 2.0 * h * t));
            out.push(self.point_at(self.r_in + (self.r_out - self.r_in) * t, h));
            out.push(self.point_at(self.r_out, h - 2.0 * h * t));
            out.push(self.point_at(self.r_out - (self.r_out - self.r_in) * t, -h));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Square(OrientedSquare),
    Sector(Sector),
    Disc { center: Point2, radius: f64 },
}

impl Shape {
    pub fn distance(&self, p: Point2) -> f64 {
        match self {
            Shape::Square(s) => s.distance(p),
            Shape::Sector(s) => s.distance(p),
            Shape::Disc { center, radius } => (center.dist(p) - radius).max(0.0),
        }
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        match self {
            Shape::Square(s) => s.contains(p, tol),
            Shape::Sector(s) => s.contains(p, tol),
            Shape::Disc { center, radius } => center.dist(p) <= radius + tol,
        }
    }

    pub fn boundary_samples(&self, per_side: usize) -> Vec<Point2> {
        match self {
            Shape::Square(s) => s.boundary_samples(per_side),
            Shape::Sector(s) => s.boundary_samples(per_side),
            Shape::Disc { center, radius } => (0..4 * per_side)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / (4 * per_side) as f64;
                    *center + Vec2::new(t.cos(), t.sin()) * *radius
                })
                .collect(),
        }
    }
}
