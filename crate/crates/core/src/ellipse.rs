//! Ellipses as affine images of the unit disc, and the predicates built on them.

use crate::error::{Error, Result};
use crate::geom::{Aabb, AffineMap2, ConvexPolygon, Mat2, Point2, Vec2};

/// Where a point sits relative to a closed convex body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// Relation between the interiors of two ellipses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contact {
    Disjoint,
    Tangent,
    Overlap,
}

impl Contact {
    /// True for the two outcomes allowed inside a packing.
    pub fn is_packable(self) -> bool {
        !matches!(self, Contact::Overlap)
    }
}

/// `E = map(unit disc)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    map: AffineMap2,
}

/// Center, semi-axes `a >= b > 0` and major-axis angle in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalEllipse {
    pub center: Point2,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub angle: f64,
}

impl Ellipse {
    pub fn from_map(map: AffineMap2) -> Result<Self> {
        let det = map.linear.det();
        if !det.is_finite() || det == 0.0 {
            return Err(Error::InvalidArgument("ellipse map is singular".into()));
        }
        Ok(Ellipse { map })
    }

    pub fn new(center: Point2, semi_axes: (f64, f64), angle: f64) -> Result<Self> {
        let (a, b) = semi_axes;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "semi-axes must be positive, got ({a}, {b})"
            )));
        }
        Ok(Ellipse {
            map: AffineMap2 {
                linear: Mat2::rotation(angle).mul(&Mat2::diag(a, b)),
                translation: center,
            },
        })
    }

    pub fn circle(center: Point2, radius: f64) -> Result<Self> {
        Ellipse::new(center, (radius, radius), 0.0)
    }

    pub fn map(&self) -> &AffineMap2 {
        &self.map
    }

    pub fn center(&self) -> Point2 {
        self.map.translation
    }

    pub fn semi_axes(&self) -> (f64, f64) {
        self.map.linear.singular_values()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.semi_axes().0
    }

    /// Length of the minor axis.
    pub fn width(&self) -> f64 {
        2.0 * self.semi_axes().1
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.map.linear.det().abs()
    }

    pub fn canonical(&self) -> CanonicalEllipse {
        let [[a, b], [c, d]] = self.map.linear.m;
        // Eigen-decomposition of L L^T gives the axes.
        let p = a * a + b * b;
        let s = c * c + d * d;
        let q = a * c + b * d;
        let (smax, smin) = self.map.linear.singular_values();
        let mut angle = if (smax - smin) <= 1e-15 * smax {
            0.0
        } else {
            0.5 * (2.0 * q).atan2(p - s)
        };
        angle = angle.rem_euclid(std::f64::consts::PI);
        if angle >= std::f64::consts::PI {
            angle = 0.0;
        }
        CanonicalEllipse {
            center: self.center(),
            semi_major: smax,
            semi_minor: smin,
            angle,
        }
    }

    /// Rebuilds the map in canonical form `rotation(angle) * diag(a, b)`.
    pub fn normalized(&self) -> Ellipse {
        let c = self.canonical();
        Ellipse::new(c.center, (c.semi_major, c.semi_minor), c.angle)
            .expect("canonical semi-axes are positive")
    }

    /// Homothety by `factor` about the center.
    pub fn enlarge(&self, factor: f64) -> Result<Ellipse> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "enlargement factor must be positive, got {factor}"
            )));
        }
        Ok(Ellipse {
            map: AffineMap2 {
                linear: self.map.linear.scale(factor),
                translation: self.map.translation,
            },
        })
    }

    pub fn transform(&self, f: &AffineMap2) -> Ellipse {
        Ellipse {
            map: f.compose(&self.map),
        }
    }

    pub fn translate(&self, t: Vec2) -> Ellipse {
        Ellipse {
            map: AffineMap2 {
                linear: self.map.linear,
                translation: self.map.translation + t,
            },
        }
    }

    /// Pre-image of `p` under the defining map; `|q| <= 1` iff `p` is in the ellipse.
    #[inline]
    pub fn to_unit(&self, p: Point2) -> Vec2 {
        let [[a, b], [c, d]] = self.map.linear.m;
        let det = a * d - b * c;
        let r = p - self.map.translation;
        Vec2::new((d * r.x - b * r.y) / det, (-c * r.x + a * r.y) / det)
    }

    pub fn locate(&self, p: Point2, tol: f64) -> Location {
        let r = self.to_unit(p).norm();
        if r < 1.0 - tol {
            Location::Interior
        } else if r > 1.0 + tol {
            Location::Exterior
        } else {
            Location::Boundary
        }
    }

    /// Closed-ellipse membership with a relative slack of `tol` in the unit frame.
    #[inline]
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.to_unit(p).norm_sq() <= (1.0 + tol) * (1.0 + tol)
    }

    pub fn bbox(&self) -> Aabb {
        let [[a, b], [c, d]] = self.map.linear.m;
        let hx = a.hypot(b);
        let hy = c.hypot(d);
        let o = self.center();
        Aabb::new(Vec2::new(o.x - hx, o.y - hy), Vec2::new(o.x + hx, o.y + hy))
    }

    /// `max_u n·(center + L u)` over the unit disc.
    pub fn support(&self, n: Vec2) -> f64 {
        let lt = self.map.linear.transpose();
        n.dot(self.center()) + lt.apply(n).norm()
    }

    pub fn boundary_point(&self, t: f64) -> Point2 {
        self.map.apply(Vec2::new(t.cos(), t.sin()))
    }

    /// Euclidean distance from `p` to the boundary curve, negative inside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let c = self.canonical();
        let local = (p - c.center).rotate(-c.angle);
        let d = distance_to_axis_ellipse(c.semi_major, c.semi_minor, local.x.abs(), local.y.abs());
        let inside = (local.x / c.semi_major).powi(2) + (local.y / c.semi_minor).powi(2) < 1.0;
        if inside {
            -d
        } else {
            d
        }
    }

    /// Perram–Wertheim contact scale: the common factor by which both
    /// ellipses must be scaled about their centers to touch. `> 1` disjoint,
    /// `= 1` tangent, `< 1` overlapping.
    pub fn contact_scale(&self, other: &Ellipse) -> f64 {
        contact_function_max(self, other).sqrt()
    }
}

/// `max_{t ∈ [0,1]} t (1-t) dᵀ [(1-t) Σ₁ + t Σ₂]⁻¹ d` with `Σᵢ = LᵢLᵢᵀ`.
///
/// The function is concave in `t`, so its derivative changes sign once; the
/// maximiser is bracketed by bisection on that sign. The denominator is the
/// pencil determinant `det((1-t)Σ₁ + tΣ₂)`.
fn contact_function_max(e1: &Ellipse, e2: &Ellipse) -> f64 {
    let d = e2.center() - e1.center();
    let sigma = |e: &Ellipse| {
        let l = e.map.linear;
        l.mul(&l.transpose())
    };
    let a = sigma(e1).m;
    let b = sigma(e2).m;
    let (a11, a12, a22) = (a[0][0], a[0][1], a[1][1]);
    let (b11, b12, b22) = (b[0][0], b[0][1], b[1][1]);
    let (dx, dy) = (d.x, d.y);
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    // N(t) = dᵀ adj(M(t)) d is linear, D(t) = det M(t) is quadratic.
    let n_at = |t: f64| {
        let m11 = a11 + t * (b11 - a11);
        let m12 = a12 + t * (b12 - a12);
        let m22 = a22 + t * (b22 - a22);
        m22 * dx * dx - 2.0 * m12 * dx * dy + m11 * dy * dy
    };
    let n0 = n_at(0.0);
    let n1 = n_at(1.0) - n0;
    let d_at = |t: f64| {
        let m11 = a11 + t * (b11 - a11);
        let m12 = a12 + t * (b12 - a12);
        let m22 = a22 + t * (b22 - a22);
        m11 * m22 - m12 * m12
    };
    let dd_at = |t: f64| {
        let m11 = a11 + t * (b11 - a11);
        let m12 = a12 + t * (b12 - a12);
        let m22 = a22 + t * (b22 - a22);
        (b11 - a11) * m22 + m11 * (b22 - a22) - 2.0 * m12 * (b12 - a12)
    };
    let f = |t: f64| t * (1.0 - t) * n_at(t) / d_at(t);
    let slope_sign = |t: f64| {
        let n = n0 + n1 * t;
        let g = t * (1.0 - t) * n;
        let dg = (1.0 - 2.0 * t) * n + t * (1.0 - t) * n1;
        dg * d_at(t) - g * dd_at(t)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope_sign(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    f(lo).max(f(hi)).max(0.0)
}

pub fn enlarge(e: &Ellipse, lambda: f64) -> Result<Ellipse> {
    e.enlarge(lambda)
}

pub fn point_location(e: &Ellipse, p: Point2, tol: f64) -> Location {
    e.locate(p, tol)
}

/// Classifies the interiors of two ellipses; tangency is declared when the
/// contact scale is within `tol` of 1.
pub fn interiors_disjoint(e1: &Ellipse, e2: &Ellipse, tol: f64) -> Contact {
    let s = e1.contact_scale(e2);
    if s > 1.0 + tol {
        Contact::Disjoint
    } else if s < 1.0 - tol {
        Contact::Overlap
    } else {
        Contact::Tangent
    }
}

/// Largest `ρ` such that the `ρ`-neighbourhood of `q` lies in `e`.
///
/// The ρ-neighbourhood of a convex polygon is the hull of the ρ-discs around
/// its vertices, so the margin is the smallest vertex-to-boundary distance.
/// The distance is computed exactly (root bracketing), not sampled. Negative
/// when some vertex is outside `e`.
pub fn coverage_margin(e: &Ellipse, q: &ConvexPolygon) -> f64 {
    q.vertices()
        .iter()
        .map(|&v| -e.signed_distance(v))
        .fold(f64::INFINITY, f64::min)
}

/// Conservative margin for a polygon and ellipse sharing one affine map:
/// the reference-frame margin times the smallest singular value.
pub fn coverage_margin_lower_bound(map: &AffineMap2, reference_margin: f64) -> f64 {
    reference_margin * map.linear.singular_values().1
}

/// Distance from `(y0, y1)`, both `>= 0`, to the ellipse `x²/e0² + y²/e1² = 1`
/// with `e0 >= e1 > 0`. Valid for points inside and outside.
fn distance_to_axis_ellipse(e0: f64, e1: f64, y0: f64, y1: f64) -> f64 {
    if e0 - e1 <= 1e-15 * e0 {
        return ((y0.hypot(y1)) - e0).abs();
    }
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1) * (e0 / e1);
                let sbar = ellipse_root(r0, z0, z1, g);
                let x0 = r0 * y0 / (sbar + r0);
                let x1 = y1 / (sbar + 1.0);
                (x0 - y0).hypot(x1 - y1)
            } else {
                0.0
            }
        } else {
            (y1 - e1).abs()
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            let x0 = e0 * xde0;
            let x1 = e1 * (1.0 - xde0 * xde0).max(0.0).sqrt();
            (x0 - y0).hypot(x1)
        } else {
            (y0 - e0).abs()
        }
    }
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if gs > 0.0 {
            s0 = s;
        } else if gs < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

/// Circular disc.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Disc {
    pub center: Point2,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid disc radius {radius}")));
        }
        Ok(Disc { center, radius })
    }

    /// The `(1 + eps)`-enlargement.
    pub fn enlarged(&self, eps: f64) -> Disc {
        Disc {
            center: self.center,
            radius: (1.0 + eps) * self.radius,
        }
    }

    pub fn to_ellipse(&self) -> Ellipse {
        Ellipse::circle(self.center, self.radius).expect("disc radius is positive")
    }
}
