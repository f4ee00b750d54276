//! Numeric audit of the inequality chain behind the chase, and calibration of
//! the two constants that are only defined through worst-case geometry.

use serde::{Deserialize, Serialize};

use super::chase::{bitten_arc, free_components};
use super::shapes::Sector;
use super::Constants;
use crate::ellipse::Disc;
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Safety factor applied to the worst-case free arc.
const ARC_SAFETY: f64 = 0.9;
/// Safety factor applied to the worst-case radius biting into `I'`.
const RADIUS_SAFETY: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub id: String,
    pub description: String,
    pub value: f64,
    pub bound: f64,
    /// `"<"`, `"<="`, `">"` or `">="`: the relation `value ? bound` that must hold.
    pub relation: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub constants: Constants,
    pub checks: Vec<AuditCheck>,
    pub pass: bool,
}

impl AuditReport {
    pub fn check(&self, id: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
    }
}

fn check(id: &str, description: &str, value: f64, relation: &str, bound: f64) -> AuditCheck {
    let pass = match relation {
        "<" => value < bound,
        "<=" => value <= bound,
        ">" => value > bound,
        ">=" => value >= bound,
        _ => false,
    };
    AuditCheck {
        id: id.into(),
        description: description.into(),
        value,
        bound,
        relation: relation.into(),
        pass,
    }
}

/// Upper bound for `|c_n v|²` in the moderate-biter case.
pub fn check_a_value(k: &Constants) -> f64 {
    let near = 1.0 + k.ring_frac + k.eps * k.r_big;
    let far = 1.0 + k.ring_frac + (1.0 + k.eps) * k.r_big;
    near * near + 2.0 * far * k.r_big * (1.0 - (3.0 * k.alpha).cos())
}

/// Lower bound for `|c_n u|²` in the moderate-biter case.
pub fn check_b_value(k: &Constants) -> f64 {
    1.0 + 2.0 * k.r_small * (1.0 - (2.0 * k.alpha).cos() - k.beta)
}

/// Length of each free piece of the outer arc when a unit disc touches the
/// parent at the middle of the crescent: the worst case for the free arc.
pub fn worst_free_arc(k: &Constants) -> f64 {
    let cn = Disc { center: Vec2::ZERO, radius: 1.0 };
    let c = Disc { center: Vec2::new(2.0, 0.0), radius: 1.0 };
    let (_, half) = bitten_arc(&cn, 0.0, &c, k);
    0.5 * k.alpha - half
}

/// Longest free piece of the outer arc for a biter of relative radius `r`
/// at center distance `d` and angular offset `phi` from the axis.
pub fn longest_free_arc(k: &Constants, r: f64, d: f64, phi: f64) -> f64 {
    let cn = Disc { center: Vec2::ZERO, radius: 1.0 };
    let c = Disc { center: Vec2::from_polar(d, phi), radius: r };
    let (center, half) = bitten_arc(&cn, 0.0, &c, k);
    free_components(center, half, k.alpha)
        .into_iter()
        .map(|(a, b)| b - a)
        .fold(0.0, f64::max)
}

/// Largest radius of a disc that bites the window `I'` while staying
/// disjoint from the parent (unit disc at the origin) and from the large
/// biter `C`. Maximised over biter radii in `[r_big, 1]` and all admissible
/// biter distances; the window sits right after the bitten arc.
pub fn worst_window_radius(k: &Constants) -> f64 {
    const RADII: usize = 3;
    const DISTANCES: usize = 3;
    let mut worst: f64 = 0.0;
    for i in 0..RADII {
        let r = k.r_big * (1.0 / k.r_big).powf(i as f64 / (RADII - 1) as f64);
        for j in 0..DISTANCES {
            let t = j as f64 / (DISTANCES - 1) as f64;
            let d = (1.0 + r) + t * (k.ring_frac + k.eps * r);
            worst = worst.max(window_radius_for(k, r, d));
        }
    }
    worst
}

fn window_radius_for(k: &Constants, r: f64, d: f64) -> f64 {
    let cn = Disc { center: Vec2::ZERO, radius: 1.0 };
    let c = Disc { center: Vec2::new(d, 0.0), radius: r };
    let (_, half) = bitten_arc(&cn, 0.0, &c, k);
    let start = half + 1e-9 * k.alpha;
    let w = Sector {
        center: Vec2::ZERO,
        r_in: 1.0,
        r_out: 1.0 + k.ring_frac,
        axis: start + 0.5 * k.arc_prime,
        half_width: 0.5 * k.arc_prime,
    };
    let feasible = |rp: f64| -> bool {
        const ANGLES: usize = 2000;
        const RADIAL: usize = 6;
        let reach = 2.0 * (1.0 + k.eps) * rp + 0.01;
        let (lo, hi) = (start - reach, start + k.arc_prime + reach);
        for a in 0..=ANGLES {
            let psi = lo + (hi - lo) * a as f64 / ANGLES as f64;
            let u = Vec2::new(psi.cos(), psi.sin());
            for b in 0..RADIAL {
                let dist = (1.0 + rp) + (k.ring_frac + k.eps * rp) * b as f64 / (RADIAL - 1) as f64;
                let cp = u * dist;
                if cp.dist(c.center) >= r + rp && w.distance(cp) <= (1.0 + k.eps) * rp {
                    return true;
                }
            }
        }
        false
    };
    if feasible(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Evaluates the whole inequality chain for `k`.
pub fn audit_constants(k: &Constants) -> AuditReport {
    let mut checks = Vec::new();
    let a = check_a_value(k);
    checks.push(check(
        "A",
        "squared distance from the parent center to the inner far corner of a turned crescent, upper bound, vs (1+beta)^2",
        a,
        "<",
        (1.0 + k.beta).powi(2),
    ));
    checks.push(check(
        "A.sqrt",
        "distance bound itself vs 1+beta",
        a.sqrt(),
        "<",
        1.0 + k.beta,
    ));
    checks.push(check(
        "B",
        "squared distance from the parent center to the outer near corner, lower bound, vs (1+eps)^2",
        check_b_value(k),
        ">",
        (1.0 + k.eps).powi(2),
    ));
    checks.push(check(
        "C",
        "sin(alpha/2) vs (1+beta) r_big sin(3 alpha): the far corner stays inside the parent wedge",
        (0.5 * k.alpha).sin(),
        ">",
        (1.0 + k.beta) * k.r_big * (3.0 * k.alpha).sin(),
    ));
    checks.push(check(
        "D",
        "worst-case free arc beside a unit biter touching mid-crescent vs arc_prime",
        worst_free_arc(k),
        ">=",
        k.arc_prime * (1.0 + 1e-9) + 1e-9 * k.alpha,
    ));
    checks.push(check(
        "E",
        "largest radius able to bite the sub-window vs r_prime_max",
        worst_window_radius(k),
        "<=",
        k.r_prime_max,
    ));
    checks.push(check(
        "E.cap",
        "r_prime_max vs r_big (the large-biter case cannot recur)",
        k.r_prime_max,
        "<",
        k.r_big,
    ));
    checks.push(check(
        "F.square",
        "sqrt(2) * 2 r_{n+1} vs 1.5 r_n for the half-size square",
        2f64.sqrt(),
        "<=",
        1.5,
    ));
    let margin = 0.5 * (k.ring_frac - k.eps - k.sq_side_factor);
    checks.push(check(
        "F.band",
        "radial margin of the small square inside the band",
        margin,
        ">",
        0.0,
    ));
    let half_angle = (0.5 * k.sq_side_factor / (1.0 + k.eps + margin.max(0.0))).atan();
    checks.push(check(
        "F.angle",
        "angular half-extent of the small square vs half of min(alpha, arc_prime)",
        half_angle,
        "<",
        0.5 * k.alpha.min(k.arc_prime),
    ));
    checks.push(check(
        "F.scale",
        "small square side vs 4 r_small (square regions have side 4r)",
        k.sq_side_factor,
        ">=",
        4.0 * k.r_small,
    ));
    let pass = checks.iter().all(|c| c.pass);
    AuditReport { constants: *k, checks, pass }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub constants: Constants,
    pub eps_max: f64,
    /// Unpadded worst-case free arc.
    pub free_arc: f64,
    /// Unpadded worst-case radius biting into the sub-window.
    pub window_radius: f64,
    pub report: AuditReport,
}

/// Fills `arc_prime` (worst free arc minus 10%) and `r_prime_max` (worst
/// window radius plus 10%) without auditing. Also returns the unpadded values.
pub fn derive_constants(partial: &Constants) -> Result<(Constants, f64, f64)> {
    let mut k = *partial;
    k.validate().map_err(|e| Error::Calibration(e.to_string()))?;
    let free_arc = worst_free_arc(&k);
    if !(free_arc > 0.0) {
        return Err(Error::Calibration(format!("no free arc in the worst case ({free_arc})")));
    }
    k.arc_prime = ARC_SAFETY * free_arc;
    let window_radius = worst_window_radius(&k);
    k.r_prime_max = RADIUS_SAFETY * window_radius;
    Ok((k, free_arc, window_radius))
}

/// [`derive_constants`], then an audit of the result and the largest
/// admissible ε.
pub fn calibrate(partial: &Constants) -> Result<Calibration> {
    let (k, free_arc, window_radius) = derive_constants(partial)?;
    let report = audit_constants(&k);
    if !report.pass {
        return Err(Error::Calibration(format!(
            "audit fails on check(s) {}",
            report.failing().join(", ")
        )));
    }
    let eps_max = eps_max(&k);
    Ok(Calibration { constants: k, eps_max, free_arc, window_radius, report })
}

/// Largest ε (by bisection) for which the audit still passes with the other
/// constants of `k` fixed.
pub fn eps_max(k: &Constants) -> f64 {
    let passes = |eps: f64| audit_constants(&Constants { eps, ..*k }).pass;
    let (mut lo, mut hi) = (0.0, k.beta.min(k.ring_frac));
    if passes(hi) {
        return hi;
    }
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
