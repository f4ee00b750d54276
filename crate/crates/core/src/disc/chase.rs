use serde::{Deserialize, Serialize};

use super::shapes::{angle_diff, OrientedSquare, Sector, Shape};
use super::{bites, Constants, DiscPacking};
use crate::ellipse::Disc;
use crate::error::{Error, Result};
use crate::geom::{Point2, Vec2};

/// Boundary points per side used by the nesting check (64 in total).
const NESTING_SAMPLES_PER_SIDE: usize = 16;
/// Relative tolerance (in units of the enclosing region's radius) for nesting.
const NESTING_TOL: f64 = 1e-9;
/// Safety stop; the radii at least halve every two steps.
const MAX_STEPS: usize = 10_000;
/// Angular gap between `a_0` and the window `I'`, as a fraction of α.
const WINDOW_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    /// Square of side `4 r`.
    Square { square: OrientedSquare, r: f64 },
    /// Crescent of `disc` (packing index `index`): the α-wedge around `axis`
    /// intersected with the β-ring of the disc. Its scale is the disc radius.
    Crescent { disc: Disc, index: usize, axis: f64 },
}

impl Region {
    pub fn r(&self) -> f64 {
        match self {
            Region::Square { r, .. } => *r,
            Region::Crescent { disc, .. } => disc.radius,
        }
    }

    pub fn shape(&self, k: &Constants) -> Shape {
        match *self {
            Region::Square { square, .. } => Shape::Square(square),
            Region::Crescent { disc, axis, .. } => Shape::Sector(crescent_sector(&disc, axis, k.beta, k)),
        }
    }
}

fn crescent_sector(disc: &Disc, axis: f64, ring: f64, k: &Constants) -> Sector {
    Sector {
        center: disc.center,
        r_in: disc.radius,
        r_out: (1.0 + ring) * disc.radius,
        axis,
        half_width: 0.5 * k.alpha,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// Square step, biter small: a half-size square.
    SquareA,
    /// Square step, biter large: a crescent of the biter.
    SquareB,
    /// Crescent step, tiny biter: a small square inside the band.
    Crescent1,
    /// Crescent step, moderate biter: a crescent of the biter.
    Crescent2,
    /// Crescent step, large biter: resolved inside a sub-window.
    Crescent3,
    /// Nothing bites the probe set; the trace ends.
    Uncovered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaseTrace {
    /// `R_1, R_2, ...`.
    pub regions: Vec<Region>,
    /// `cases[k]` is how `regions[k]` was processed.
    pub cases: Vec<CaseLabel>,
    /// Sub-windows used by case-3 steps, aligned with `cases`.
    pub windows: Vec<Option<Sector>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaseOutcome {
    pub point: Point2,
    pub trace: ChaseTrace,
}

enum Step {
    Next(Region, CaseLabel, Option<Sector>),
    Done(Point2, CaseLabel, Option<Sector>),
}

fn violation(msg: String) -> Error {
    Error::InvariantViolation(msg)
}

/// Largest disc (ties: lowest index) other than `exclude` that bites `x`.
fn largest_biter(p: &DiscPacking, x: &Shape, eps: f64, exclude: Option<usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, d) in p.discs.iter().enumerate() {
        if Some(i) == exclude || !bites(d, x, eps) {
            continue;
        }
        if best.is_none_or(|b| d.radius > p.discs[b].radius) {
            best = Some(i);
        }
    }
    best
}

/// Runs the region-shrinking procedure from `start` (side `4 r`) until a probe
/// set has no biter, and returns a point outside every enlarged disc.
///
/// At every step the inductive hypothesis (no disc larger than `r_k` bites
/// `R_k`), nesting of consecutive regions and the decay `r_{k+2} <= r_k / 2`
/// are checked; any failure is an [`Error::InvariantViolation`].
pub fn chase(packing: &DiscPacking, start: OrientedSquare, k: &Constants) -> Result<ChaseOutcome> {
    k.validate()?;
    let mut region = Region::Square { square: start, r: 0.5 * start.half_side };
    let mut trace = ChaseTrace { regions: Vec::new(), cases: Vec::new(), windows: Vec::new() };
    for _ in 0..MAX_STEPS {
        check_hypothesis(packing, &region, k)?;
        trace.regions.push(region);
        check_decay(&trace.regions)?;
        let step = match region {
            Region::Square { square, r } => square_step(packing, square, r, k),
            Region::Crescent { disc, index, axis } => crescent_step(packing, disc, index, axis, k)?,
        };
        match step {
            Step::Next(next, label, window) => {
                check_nesting(&region, &next, k)?;
                trace.cases.push(label);
                trace.windows.push(window);
                region = next;
            }
            Step::Done(point, label, window) => {
                trace.cases.push(label);
                trace.windows.push(window);
                if !packing.is_uncovered(point, k.eps) {
                    return Err(violation(format!("final point {point:?} is covered")));
                }
                return Ok(ChaseOutcome { point, trace });
            }
        }
    }
    Err(violation(format!("no uncovered point after {MAX_STEPS} steps")))
}

fn check_hypothesis(p: &DiscPacking, region: &Region, k: &Constants) -> Result<()> {
    let r = region.r();
    let shape = region.shape(k);
    for (i, d) in p.discs.iter().enumerate() {
        if d.radius > r * (1.0 + 1e-12) && bites(d, &shape, k.eps) {
            return Err(violation(format!(
                "disc {i} of radius {} bites a region of scale {r}",
                d.radius
            )));
        }
    }
    Ok(())
}

fn check_decay(regions: &[Region]) -> Result<()> {
    let n = regions.len();
    if n >= 3 {
        let (a, c) = (regions[n - 3].r(), regions[n - 1].r());
        if c > 0.5 * a * (1.0 + 1e-12) {
            return Err(violation(format!("scale went from {a} to {c} in two steps")));
        }
    }
    Ok(())
}

fn check_nesting(outer: &Region, inner: &Region, k: &Constants) -> Result<()> {
    let tol = NESTING_TOL * outer.r();
    let o = outer.shape(k);
    if let Some(p) = inner
        .shape(k)
        .boundary_samples(NESTING_SAMPLES_PER_SIDE)
        .into_iter()
        .find(|&p| !o.contains(p, tol))
    {
        return Err(violation(format!("region not nested: boundary point {p:?} escapes")));
    }
    Ok(())
}

fn square_step(p: &DiscPacking, square: OrientedSquare, r: f64, k: &Constants) -> Step {
    let o = square.center;
    let d = Shape::Disc { center: o, radius: 1.5 * r };
    let Some(i) = largest_biter(p, &d, k.eps, None) else {
        return Step::Done(o, CaseLabel::Uncovered, None);
    };
    let c = p.discs[i];
    if c.radius <= 0.5 * r {
        let next = OrientedSquare { half_side: square.half_side * 0.5, ..square };
        return Step::Next(Region::Square { square: next, r: 0.5 * r }, CaseLabel::SquareA, None);
    }
    let v = o - c.center;
    let axis = if v.norm() == 0.0 { 0.0 } else { v.angle() };
    Step::Next(Region::Crescent { disc: c, index: i, axis }, CaseLabel::SquareB, None)
}

fn crescent_step(p: &DiscPacking, cn: Disc, n_idx: usize, axis: f64, k: &Constants) -> Result<Step> {
    let band = crescent_sector(&cn, axis, k.ring_frac, k);
    let probe = Shape::Sector(band);
    let Some(i) = largest_biter(p, &probe, k.eps, Some(n_idx)) else {
        return Ok(Step::Done(band.midpoint(), CaseLabel::Uncovered, None));
    };
    let c = p.discs[i];
    let r = c.radius / cn.radius;
    if r <= k.r_small {
        return Ok(Step::Next(small_square(&cn, axis, k), CaseLabel::Crescent1, None));
    }
    if r <= k.r_big {
        return Ok(Step::Next(turned_crescent(&cn, axis, &c, i, k)?, CaseLabel::Crescent2, None));
    }

    let window = sub_window(&cn, axis, &c, k)?;
    let Some(j) = largest_biter(p, &Shape::Sector(window), k.eps, Some(n_idx)) else {
        return Ok(Step::Done(window.midpoint(), CaseLabel::Crescent3, Some(window)));
    };
    let c2 = p.discs[j];
    let r2 = c2.radius / cn.radius;
    if r2 > k.r_prime_max {
        return Err(violation(format!(
            "disc {j} of relative radius {r2} bites the sub-window (bound {})",
            k.r_prime_max
        )));
    }
    let next = if r2 <= k.r_small {
        small_square(&cn, window.axis, k)
    } else {
        turned_crescent(&cn, axis, &c2, j, k)?
    };
    Ok(Step::Next(next, CaseLabel::Crescent3, Some(window)))
}

/// Square of side `sq_side_factor * ρ` on the probe axis, radially inside
/// `[(1 + ε) ρ, (1 + ring_frac) ρ]` with equal margins.
fn small_square(cn: &Disc, axis: f64, k: &Constants) -> Region {
    let rho = cn.radius;
    let side = k.sq_side_factor * rho;
    let margin = 0.5 * (k.ring_frac - k.eps - k.sq_side_factor) * rho;
    let radial = (1.0 + k.ring_frac) * rho - margin - 0.5 * side;
    let center = cn.center + Vec2::new(axis.cos(), axis.sin()) * radial;
    Region::Square {
        square: OrientedSquare { center, half_side: 0.5 * side, angle: axis },
        r: 0.25 * side,
    }
}

/// Crescent of `c` whose axis makes angle 5α/2 with the halfline from `c`
/// through the center of `cn`, on the side nearer the current axis.
fn turned_crescent(cn: &Disc, axis: f64, c: &Disc, idx: usize, k: &Constants) -> Result<Region> {
    let toward = (cn.center - c.center).angle();
    let turn = 2.5 * k.alpha;
    let score = |a: f64| {
        let mid = c.center + Vec2::new(a.cos(), a.sin()) * ((1.0 + 0.5 * k.beta) * c.radius);
        angle_diff((mid - cn.center).angle(), axis).abs()
    };
    let (plus, minus) = (toward + turn, toward - turn);
    let (new_axis, sign) = if score(minus) < score(plus) { (minus, -1.0) } else { (plus, 1.0) };

    // Corner checks: u (outer, 2α), v (inner, 3α), w (outer, 3α).
    let at = |angle: f64, rad: f64| c.center + Vec2::new(angle.cos(), angle.sin()) * rad;
    let u = at(toward + sign * 2.0 * k.alpha, (1.0 + k.beta) * c.radius);
    let v = at(toward + sign * 3.0 * k.alpha, c.radius);
    let w = at(toward + sign * 3.0 * k.alpha, (1.0 + k.beta) * c.radius);
    let rho = cn.radius;
    if v.dist(cn.center) > (1.0 + k.beta) * rho {
        return Err(violation(format!("corner v outside the outer ring of disc {idx}'s parent")));
    }
    if u.dist(cn.center) <= (1.0 + k.eps) * rho {
        return Err(violation("corner u is bitten by the parent disc".into()));
    }
    if angle_diff((w - cn.center).angle(), axis).abs() > 0.5 * k.alpha * (1.0 + 1e-9) {
        return Err(violation("corner w crosses the side of the parent crescent".into()));
    }
    Ok(Region::Crescent { disc: *c, index: idx, axis: new_axis })
}

/// The angular interval (relative to `axis`) of the outer arc of the probe
/// band that lies inside `c^ε`, as `(center, half_width)`.
pub(crate) fn bitten_arc(cn: &Disc, axis: f64, c: &Disc, k: &Constants) -> (f64, f64) {
    let ra = (1.0 + k.ring_frac) * cn.radius;
    let rc = (1.0 + k.eps) * c.radius;
    let d = c.center.dist(cn.center);
    let phi = angle_diff((c.center - cn.center).angle(), axis);
    let cos_h = ((ra * ra + d * d - rc * rc) / (2.0 * ra * d)).clamp(-1.0, 1.0);
    (phi, cos_h.acos())
}

/// The free components of the outer arc `[-α/2, α/2]` minus the bitten arc,
/// as `(start, end)` offsets from the axis.
pub(crate) fn free_components(center: f64, half: f64, alpha: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = (-0.5 * alpha, 0.5 * alpha);
    let (j0, j1) = (center - half, center + half);
    let mut out = Vec::new();
    if j0 > lo {
        out.push((lo, j0.min(hi)));
    }
    if j1 < hi {
        out.push((j1.max(lo), hi));
    }
    out
}

/// Window `I'` of angular length `arc_prime` adjacent to the bitten arc,
/// in the longer free component (ties: the one nearer the axis).
fn sub_window(cn: &Disc, axis: f64, c: &Disc, k: &Constants) -> Result<Sector> {
    let (center, half) = bitten_arc(cn, axis, c, k);
    let comps = free_components(center, half, k.alpha);
    let len = |(a, b): (f64, f64)| b - a;
    let axis_dist = |(a, b): (f64, f64)| if a <= 0.0 && 0.0 <= b { 0.0 } else { a.abs().min(b.abs()) };
    let best = comps
        .iter()
        .copied()
        .max_by(|&x, &y| {
            len(x)
                .total_cmp(&len(y))
                .then_with(|| axis_dist(y).total_cmp(&axis_dist(x)))
        })
        .ok_or_else(|| Error::ConstantsInfeasible("the bitten arc covers the whole band".into()))?;
    let gap = WINDOW_GAP * k.alpha;
    if len(best) < k.arc_prime + gap {
        return Err(Error::ConstantsInfeasible(format!(
            "free arc {} is shorter than arc_prime {}",
            len(best),
            k.arc_prime
        )));
    }
    // Adjacent to the bitten arc: the component end nearer to it.
    let (a, b) = best;
    let offset = if (a - (center + half)).abs() <= (b - (center - half)).abs() {
        a + gap + 0.5 * k.arc_prime
    } else {
        b - gap - 0.5 * k.arc_prime
    };
    Ok(Sector {
        center: cn.center,
        r_in: cn.radius,
        r_out: (1.0 + k.ring_frac) * cn.radius,
        axis: axis + offset,
        half_width: 0.5 * k.arc_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::calibrate;

    fn consts() -> Constants {
        static K: std::sync::OnceLock<Constants> = std::sync::OnceLock::new();
        *K.get_or_init(|| calibrate(&Constants::default_base()).unwrap().constants)
    }

    fn start() -> OrientedSquare {
        OrientedSquare { center: Vec2::ZERO, half_side: 2.0, angle: 0.0 }
    }

    fn disc(x: f64, y: f64, r: f64) -> Disc {
        Disc { center: Vec2::new(x, y), radius: r }
    }

    #[test]
    fn empty_packing_returns_center() {
        let out = chase(&DiscPacking::default(), start(), &consts()).unwrap();
        assert_eq!(out.point, Vec2::ZERO);
        assert_eq!(out.trace.cases, vec![CaseLabel::Uncovered]);
    }

    #[test]
    fn single_unit_disc() {
        let k = consts();
        let p = DiscPacking::new(vec![disc(0.0, 0.0, 1.0)]);
        let out = chase(&p, start(), &k).unwrap();
        assert!(out.point.norm() > 1.0 + k.eps);
        assert_eq!(out.trace.cases[0], CaseLabel::SquareB);
    }

    #[test]
    fn square_case_a() {
        let k = consts();
        let p = DiscPacking::new(vec![disc(1.0, 0.0, 0.3)]);
        let out = chase(&p, start(), &k).unwrap();
        assert_eq!(out.trace.cases[0], CaseLabel::SquareA);
        match out.trace.regions[1] {
            Region::Square { square, r } => {
                assert_eq!(r, 0.5);
                assert_eq!(square.half_side, 1.0);
                assert!(2f64.sqrt() * square.half_side < 1.5);
            }
            _ => panic!("expected a square"),
        }
    }

    #[test]
    fn crescent_case_2_corner_bound() {
        let k = consts();
        // Parent disc of radius 1 at the origin, crescent around +x.
        let cn = disc(0.0, 0.0, 1.0);
        let r = 0.1;
        let c = disc(1.0 + r + 1e-3, 0.02, r);
        let p = DiscPacking::new(vec![cn, c]);
        match crescent_step(&p, cn, 0, 0.0, &k).unwrap() {
            Step::Next(Region::Crescent { disc, axis, .. }, CaseLabel::Crescent2, None) => {
                assert_eq!(disc, c);
                let toward = (cn.center - c.center).angle();
                let turned = angle_diff(axis, toward).abs();
                assert!((turned - 2.5 * k.alpha).abs() < 1e-12);
                let sign = angle_diff(axis, toward).signum();
                let v = c.center + Vec2::from_polar(r, toward + sign * 3.0 * k.alpha);
                assert!(v.norm() < 1.03);
            }
            _ => panic!("expected case 2"),
        }
    }

    #[test]
    fn case_2_biter_beside_the_wedge_is_reported() {
        // A small biter whose center lies just outside the parent's angle:
        // the turned crescent hugs the biter and so leaves the parent region.
        let k = consts();
        let cn = disc(0.0, 0.0, 1.0);
        let r = 0.01;
        let c = Disc { center: Vec2::from_polar(1.0 + r + 1e-6, -(0.5 * k.alpha + 0.007)), radius: r };
        let p = DiscPacking::new(vec![cn, c]);
        assert!(bites(&c, &Shape::Sector(crescent_sector(&cn, 0.0, k.ring_frac, &k)), k.eps));
        match crescent_step(&p, cn, 0, 0.0, &k) {
            Err(Error::InvariantViolation(msg)) => assert!(msg.contains("corner w"), "{msg}"),
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => panic!("expected an invariant violation"),
        }
    }

    #[test]
    fn crescent_case_3_window_avoids_biter() {
        let k = consts();
        let cn = disc(0.0, 0.0, 1.0);
        let c = disc(1.5, 0.01, 0.5);
        let p = DiscPacking::new(vec![cn, c]);
        match crescent_step(&p, cn, 0, 0.0, &k).unwrap() {
            Step::Done(pt, CaseLabel::Crescent3, Some(w)) => {
                for q in w.boundary_samples(64) {
                    assert!(q.dist(c.center) > (1.0 + k.eps) * c.radius);
                }
                assert!(p.is_uncovered(pt, k.eps));
            }
            _ => panic!("expected case 3 with an empty window"),
        }
    }

    #[test]
    fn no_biter_in_band_returns_band_midpoint() {
        let k = consts();
        let cn = disc(0.0, 0.0, 1.0);
        let p = DiscPacking::new(vec![cn]);
        match crescent_step(&p, cn, 0, 0.3, &k).unwrap() {
            Step::Done(pt, CaseLabel::Uncovered, None) => {
                assert!((pt.norm() - (1.0 + 0.5 * k.ring_frac)).abs() < 1e-12);
                assert!((pt.angle() - 0.3).abs() < 1e-12);
            }
            _ => panic!("expected an uncovered point"),
        }
    }
}
