//! Disc packings whose `(1 + ε)`-enlargement cannot cover a square of side 4:
//! probe regions, the bite relation, an adversarial chase that produces an
//! uncovered point, and an audit of the numeric constants behind it.

mod audit;
mod chase;
mod shapes;

pub use audit::{
    audit_constants, calibrate, check_a_value, check_b_value, derive_constants, eps_max, longest_free_arc, worst_free_arc,
    worst_window_radius, AuditCheck, AuditReport, Calibration,
};
pub use chase::{chase, CaseLabel, ChaseOutcome, ChaseTrace, Region};
pub use shapes::{angle_diff, OrientedSquare, Sector, Shape};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ellipse::Disc;
use crate::error::{Error, Result};
use crate::geom::{Aabb, Point2, Vec2};

/// Parameter bundle for the region-shrinking argument. Lengths are in units of
/// the current disc radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub eps: f64,
    /// Opening angle of a crescent.
    pub alpha: f64,
    /// Relative ring thickness of a crescent.
    pub beta: f64,
    /// Relative ring thickness of the probe band `I`.
    pub ring_frac: f64,
    /// Largest biter radius handled by a small square.
    pub r_small: f64,
    /// Largest biter radius handled by a new crescent.
    pub r_big: f64,
    /// Angular length of the sub-window `I'`.
    pub arc_prime: f64,
    /// Upper bound on the radius of a disc biting into `I'`.
    pub r_prime_max: f64,
    /// Side of the small square, in units of the current radius.
    pub sq_side_factor: f64,
}

impl Constants {
    /// Base constants with `arc_prime` and `r_prime_max` still unset (zero).
    pub fn base(eps: f64, alpha: f64, beta: f64) -> Self {
        let r_small = beta / 80.0;
        Constants {
            eps,
            alpha,
            beta,
            ring_frac: beta / 16.0,
            r_small,
            r_big: 0.125,
            arc_prime: 0.0,
            r_prime_max: 0.0,
            sq_side_factor: 4.0 * r_small,
        }
    }

    pub fn default_base() -> Self {
        Constants::base(1e-5, std::f64::consts::PI / 16.0, 1.0 / 16.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.eps
            && self.eps < self.beta
            && self.beta < self.alpha
            && self.alpha < std::f64::consts::FRAC_PI_2
            && self.ring_frac > self.eps
            && self.r_small > 0.0
            && self.r_small < self.r_big
            && self.r_big <= 1.0
            && self.sq_side_factor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("inconsistent constants {self:?}")))
        }
    }
}

/// `C` bites into `X` when `C^ε` meets `X`.
pub fn bites(c: &Disc, x: &Shape, eps: f64) -> bool {
    x.distance(c.center) <= (1.0 + eps) * c.radius
}

/// `C` bites into the single point `p`.
pub fn bites_point(c: &Disc, p: Point2, eps: f64) -> bool {
    c.center.dist(p) <= (1.0 + eps) * c.radius
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscPacking {
    pub discs: Vec<Disc>,
}

impl DiscPacking {
    pub fn new(discs: Vec<Disc>) -> Self {
        DiscPacking { discs }
    }

    /// Checks radii in `(0, 1]` and pairwise interior-disjointness.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (i, d) in self.discs.iter().enumerate() {
            if !(d.radius > 0.0 && d.radius <= 1.0) {
                return Err(Error::InvalidArgument(format!("disc {i} has radius {}", d.radius)));
            }
        }
        for i in 0..self.discs.len() {
            for j in i + 1..self.discs.len() {
                let (a, b) = (&self.discs[i], &self.discs[j]);
                if a.center.dist(b.center) < a.radius + b.radius - tol {
                    return Err(Error::InvalidArgument(format!("discs {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// True when `p` lies outside every `(1 + eps)`-enlarged disc.
    pub fn is_uncovered(&self, p: Point2, eps: f64) -> bool {
        self.discs.iter().all(|d| !bites_point(d, p, eps))
    }

    /// Fraction of `region` covered by the (unenlarged) discs, estimated on a grid.
    pub fn density(&self, region: &Aabb, samples_per_side: usize) -> f64 {
        let k = samples_per_side.max(1);
        let mut hit = 0usize;
        for j in 0..k {
            for i in 0..k {
                let p = Vec2::new(
                    region.min.x + (i as f64 + 0.5) / k as f64 * region.width(),
                    region.min.y + (j as f64 + 0.5) / k as f64 * region.height(),
                );
                if self.discs.iter().any(|d| d.center.dist(p) <= d.radius) {
                    hit += 1;
                }
            }
        }
        hit as f64 / (k * k) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomPackingParams {
    pub region: Aabb,
    pub r_min: f64,
    pub r_max: f64,
    /// Stop after this many consecutive rejected candidates.
    pub max_rejections: usize,
}

impl Default for RandomPackingParams {
    fn default() -> Self {
        RandomPackingParams {
            region: Aabb::new(Vec2::new(-3.0, -3.0), Vec2::new(3.0, 3.0)),
            r_min: 0.05,
            r_max: 1.0,
            max_rejections: 2000,
        }
    }
}

/// Rejection-sampled packing: uniform radius and center, kept when disjoint
/// from everything accepted so far. Deterministic for a given seed.
pub fn random_greedy_packing(seed: u64, params: &RandomPackingParams) -> Result<DiscPacking> {
    let RandomPackingParams { region, r_min, r_max, max_rejections } = *params;
    if !(0.0 < r_min && r_min <= r_max && r_max <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "radius range [{r_min}, {r_max}] must lie in (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut discs: Vec<Disc> = Vec::new();
    let mut rejected = 0;
    while rejected < max_rejections {
        let r = if r_max > r_min { rng.gen_range(r_min..=r_max) } else { r_min };
        let c = Vec2::new(
            rng.gen_range(region.min.x..=region.max.x),
            rng.gen_range(region.min.y..=region.max.y),
        );
        if discs.iter().all(|d| d.center.dist(c) >= d.radius + r) {
            discs.push(Disc { center: c, radius: r });
            rejected = 0;
        } else {
            rejected += 1;
        }
    }
    Ok(DiscPacking { discs })
}

/// Grid scan for a point outside every enlarged disc; tries the region center first.
pub fn brute_force_uncovered(packing: &DiscPacking, eps: f64, region: &Aabb, grid_step: f64) -> Result<Option<Point2>> {
    if !(grid_step > 0.0) {
        return Err(Error::InvalidArgument(format!("grid step must be positive, got {grid_step}")));
    }
    if packing.is_uncovered(region.center(), eps) {
        return Ok(Some(region.center()));
    }
    let nx = (region.width() / grid_step).floor() as usize;
    let ny = (region.height() / grid_step).floor() as usize;
    for j in 0..=ny {
        for i in 0..=nx {
            let p = Vec2::new(region.min.x + i as f64 * grid_step, region.min.y + j as f64 * grid_step);
            if packing.is_uncovered(p, eps) {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// On-disk form: `{ eps, discs: [ { c: [x, y], r } ] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscPackingFile {
    pub eps: f64,
    pub discs: Vec<DiscRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscRecord {
    pub c: [f64; 2],
    pub r: f64,
}

impl DiscPackingFile {
    pub fn from_packing(p: &DiscPacking, eps: f64) -> Self {
        DiscPackingFile {
            eps,
            discs: p
                .discs
                .iter()
                .map(|d| DiscRecord { c: [d.center.x, d.center.y], r: d.radius })
                .collect(),
        }
    }

    pub fn to_packing(&self) -> Result<DiscPacking> {
        let discs = self
            .discs
            .iter()
            .map(|d| Disc::new(Vec2::new(d.c[0], d.c[1]), d.r))
            .collect::<Result<_>>()?;
        Ok(DiscPacking { discs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Disc {
        Disc { center: Vec2::ZERO, radius: 1.0 }
    }

    #[test]
    fn bite_examples() {
        let eps = 1e-5;
        assert!(bites_point(&unit(), Vec2::new(1.0 + eps / 2.0, 0.0), eps));
        assert!(!bites_point(&unit(), Vec2::new(1.0 + 2.0 * eps, 0.0), eps));
        let sq = Shape::Square(OrientedSquare { center: Vec2::new(3.0, 0.0), half_side: 2.0, angle: 0.0 });
        assert!(bites(&unit(), &sq, eps));
    }

    #[test]
    fn random_packing_is_deterministic_and_disjoint() {
        let params = RandomPackingParams::default();
        let a = random_greedy_packing(7, &params).unwrap();
        let b = random_greedy_packing(7, &params).unwrap();
        assert_eq!(a, b);
        assert!(!a.discs.is_empty());
        a.validate(1e-12).unwrap();
        let c = random_greedy_packing(8, &params).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_packing_rejects_bad_range() {
        let params = RandomPackingParams { r_max: 1.5, ..RandomPackingParams::default() };
        assert!(random_greedy_packing(1, &params).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let region = Aabb::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0));
        let empty = DiscPacking::default();
        assert_eq!(brute_force_uncovered(&empty, 1e-5, &region, 0.5).unwrap(), Some(Vec2::ZERO));
        let small = Aabb::new(Vec2::new(-0.3, -0.3), Vec2::new(0.3, 0.3));
        let one = DiscPacking::new(vec![unit()]);
        assert_eq!(brute_force_uncovered(&one, 1e-5, &small, 0.1).unwrap(), None);
    }

    #[test]
    fn file_round_trip() {
        let p = random_greedy_packing(3, &RandomPackingParams::default()).unwrap();
        let f = DiscPackingFile::from_packing(&p, 1e-5);
        let text = serde_json::to_string(&f).unwrap();
        let back: DiscPackingFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_packing().unwrap(), p);
    }
}
