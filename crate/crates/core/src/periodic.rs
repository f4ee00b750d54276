//! Periodic ellipse packing over the equilateral triangle lattice whose
//! λ-enlargement covers the plane.
//!
//! Per upward lattice triangle: one initial tile, a fan triangulation of the
//! rest into triangles based on the tile's inner edges, and a greedy tiling of
//! each fan triangle down to a strip along its base. Residual strips are
//! certified to lie in the enlarged initial ellipse. The downward triangle is
//! the half-turn image of the upward one.

use std::fmt;

use rayon::prelude::*;

use crate::ellipse::{coverage_margin, Ellipse};
use crate::error::{Error, Result};
use crate::geom::{AffineMap2, Point2, Triangle, Vec2};
use crate::inscription::{choose_n, circumradius, properly_inscribe, reference_polygon, ProperTile, RegularGonSpec};
use crate::tiler::{forecast_tile_count, tile_until_with, TilerOptions, TilingResult};

/// Maximum number of δ-halvings after a failed residual certification.
pub const MAX_DELTA_RETRIES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaPolicy {
    /// Half the coverage margin of the initial tile.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingConfig {
    pub lambda: f64,
    pub n_override: Option<usize>,
    pub delta_policy: DeltaPolicy,
    pub triangle_side: f64,
    /// Budget for the total number of tiles in one upward triangle.
    pub max_tiles: usize,
}

impl PackingConfig {
    pub fn new(lambda: f64) -> Self {
        PackingConfig {
            lambda,
            n_override: None,
            delta_policy: DeltaPolicy::Auto,
            triangle_side: 1.0,
            max_tiles: crate::tiler::DEFAULT_TILE_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if !(self.lambda > 1.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must exceed 1, got {}",
                self.lambda
            )));
        }
        if !(self.triangle_side > 0.0) || !self.triangle_side.is_finite() {
            return Err(Error::InvalidArgument("triangle side must be positive".into()));
        }
        if let DeltaPolicy::Fixed(d) = self.delta_policy {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::InvalidArgument(format!("fixed delta must be positive, got {d}")));
            }
        }
        match self.n_override {
            Some(n) if n < 2 => Err(Error::InvalidArgument(format!("n must be at least 2, got {n}"))),
            Some(n) if circumradius(n) >= self.lambda => Err(Error::Configuration(format!(
                "the 2n-gon for n = {n} does not fit in the {}-enlarged disc",
                self.lambda
            ))),
            Some(n) => Ok(n),
            None => choose_n(self.lambda),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Up,
    Down,
}

/// Where an ellipse of the cell came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Provenance {
    pub triangle: Orientation,
    /// `None` for the initial tile; otherwise the fan triangle index.
    pub fan: Option<usize>,
    /// Index of the tile within the fan triangle's tiling.
    pub tile: Option<usize>,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.triangle {
            Orientation::Up => "up",
            Orientation::Down => "down",
        };
        match (self.fan, self.tile) {
            (Some(fan), Some(tile)) => write!(f, "{t}/fan{fan}/tile{tile}"),
            _ => write!(f, "{t}/initial"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad provenance '{s}'"));
        let mut parts = s.split('/');
        let triangle = match parts.next() {
            Some("up") => Orientation::Up,
            Some("down") => Orientation::Down,
            _ => return Err(bad()),
        };
        let rest: Vec<&str> = parts.collect();
        match rest.as_slice() {
            ["initial"] => Ok(Provenance { triangle, fan: None, tile: None }),
            [fan, tile] => {
                let fan = fan.strip_prefix("fan").and_then(|x| x.parse().ok()).ok_or_else(bad)?;
                let tile = tile.strip_prefix("tile").and_then(|x| x.parse().ok()).ok_or_else(bad)?;
                Ok(Provenance { triangle, fan: Some(fan), tile: Some(tile) })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellEllipse {
    pub ellipse: Ellipse,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPacking {
    pub lambda: f64,
    pub n: usize,
    pub triangle_side: f64,
    pub lattice: [Vec2; 2],
    pub cell: Vec<CellEllipse>,
}

impl PeriodicPacking {
    pub fn ellipses(&self) -> impl Iterator<Item = &Ellipse> + '_ {
        self.cell.iter().map(|c| &c.ellipse)
    }

    pub fn lattice_vector(&self, i: i64, j: i64) -> Vec2 {
        self.lattice[0] * i as f64 + self.lattice[1] * j as f64
    }

    /// The cell translated by lattice vector `(i, j)`.
    pub fn translated(&self, i: i64, j: i64) -> Vec<Ellipse> {
        let t = self.lattice_vector(i, j);
        self.ellipses().map(|e| e.translate(t)).collect()
    }

    /// The cell together with its 8 neighbouring translates.
    pub fn with_neighbors(&self) -> Vec<Ellipse> {
        let mut out = Vec::with_capacity(9 * self.cell.len());
        for j in -1..=1 {
            for i in -1..=1 {
                out.extend(self.translated(i, j));
            }
        }
        out
    }

    pub fn stats(&self) -> PackingStats {
        let mut s = PackingStats {
            ellipse_count: self.cell.len(),
            min_width: f64::INFINITY,
            max_diameter: 0.0,
            min_diameter: f64::INFINITY,
        };
        for e in self.ellipses() {
            let (a, b) = e.semi_axes();
            s.min_width = s.min_width.min(2.0 * b);
            s.max_diameter = s.max_diameter.max(2.0 * a);
            s.min_diameter = s.min_diameter.min(2.0 * a);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingStats {
    pub ellipse_count: usize,
    pub min_width: f64,
    pub max_diameter: f64,
    pub min_diameter: f64,
}

/// The upward unit triangle `(0,0), (s,0), (s/2, s√3/2)` with its bottom side as base.
pub fn up_triangle(side: f64) -> Triangle {
    Triangle::with_base(
        Vec2::ZERO,
        Vec2::new(side, 0.0),
        Vec2::new(0.5 * side, 0.5 * 3f64.sqrt() * side),
    )
    .expect("equilateral triangle is valid")
}

pub fn lattice_basis(side: f64) -> [Vec2; 2] {
    [Vec2::new(side, 0.0), Vec2::new(0.5 * side, 0.5 * 3f64.sqrt() * side)]
}

/// Half-turn about the midpoint of the upward triangle's right side; it maps
/// the upward triangle onto the adjacent downward one.
pub fn down_map(side: f64) -> AffineMap2 {
    AffineMap2::half_turn(Vec2::new(0.75 * side, 0.25 * 3f64.sqrt() * side))
}

/// Fan triangulation of `t` minus `initial`. Triangle `i` has the tile edge
/// `(w_i, w_{i+1})` as its base (reversed, so the apex lies on its left) and
/// apex at the base start of `t` for the left chain, base end for the right.
pub fn fan_pockets(t: &Triangle, initial: &ProperTile, spec: &RegularGonSpec) -> Result<Vec<Triangle>> {
    let w = initial.polygon.vertices();
    let n = spec.n;
    (1..=2 * n - 2)
        .map(|i| {
            let apex = if i < n { t.base_start() } else { t.base_end() };
            Triangle::with_base(w[i + 1], w[i], apex)
                .map_err(|e| Error::Internal(format!("degenerate fan triangle {i}: {e}")))
        })
        .collect()
}

/// Half the coverage margin of the λ-enlarged tile ellipse over the tile.
pub fn choose_delta(tile: &ProperTile, lambda: f64) -> Result<f64> {
    let enlarged = tile.ellipse.enlarge(lambda)?;
    let margin = coverage_margin(&enlarged, &tile.polygon);
    if !(margin > 1e-12 * tile.polygon.diameter()) {
        return Err(Error::Configuration(format!(
            "coverage margin {margin:e} is not positive; the polygon order is too small for lambda = {lambda}"
        )));
    }
    Ok(0.5 * margin)
}

/// One fan triangle's greedy tiling and the δ it was certified with.
#[derive(Debug, Clone)]
pub struct FanTiling {
    pub triangle: Triangle,
    pub delta: f64,
    pub tiling: TilingResult,
}

/// Everything placed in the upward triangle.
#[derive(Debug, Clone)]
pub struct UpPattern {
    pub spec: RegularGonSpec,
    pub triangle: Triangle,
    pub initial: ProperTile,
    pub fans: Vec<FanTiling>,
}

impl UpPattern {
    pub fn tile_count(&self) -> usize {
        1 + self.fans.iter().map(|f| f.tiling.tiles.len()).sum::<usize>()
    }
}

/// Strict containment of every residual triangle in `cover`, by convexity
/// from its vertices.
fn residual_certified(residual: &[Triangle], cover: &Ellipse) -> bool {
    const STRICT: f64 = 1e-12;
    residual
        .iter()
        .all(|t| t.v.iter().all(|&p| cover.to_unit(p).norm() < 1.0 - STRICT))
}

/// Exact total tile count for the upward triangle at the given δ.
pub fn forecast_cell_tiles(fans: &[Triangle], n: usize, delta: f64) -> u128 {
    1 + fans
        .iter()
        .map(|f| forecast_tile_count(n, f.height(), delta))
        .fold(0u128, u128::saturating_add)
}

pub fn build_up_pattern(cfg: &PackingConfig) -> Result<UpPattern> {
    let n = cfg.validate()?;
    let spec = reference_polygon(n)?;
    let triangle = up_triangle(cfg.triangle_side);
    let initial = properly_inscribe(&triangle, &spec)?;
    let fans = fan_pockets(&triangle, &initial, &spec)?;
    let cover = initial.ellipse.enlarge(cfg.lambda)?;
    let mut delta = match cfg.delta_policy {
        DeltaPolicy::Auto => choose_delta(&initial, cfg.lambda)?,
        DeltaPolicy::Fixed(d) => d,
    };

    for attempt in 0..=MAX_DELTA_RETRIES {
        let forecast = forecast_cell_tiles(&fans, n, delta);
        if forecast > cfg.max_tiles as u128 {
            return Err(Error::TileBudget {
                forecast,
                budget: cfg.max_tiles,
            });
        }
        let opts = TilerOptions {
            max_tiles: cfg.max_tiles,
        };
        let tilings: Vec<TilingResult> = fans
            .par_iter()
            .map(|f| tile_until_with(f, delta, &spec, &opts))
            .collect::<Result<_>>()?;
        if tilings.iter().all(|r| residual_certified(&r.residual, &cover)) {
            let fans = fans
                .iter()
                .zip(tilings)
                .map(|(&triangle, tiling)| FanTiling { triangle, delta, tiling })
                .collect();
            return Ok(UpPattern { spec, triangle, initial, fans });
        }
        if attempt == MAX_DELTA_RETRIES {
            break;
        }
        delta *= 0.5;
    }
    Err(Error::Certification(format!(
        "residual strips not covered after {MAX_DELTA_RETRIES} halvings of delta"
    )))
}

pub fn build_cell(cfg: &PackingConfig) -> Result<PeriodicPacking> {
    let up = build_up_pattern(cfg)?;
    Ok(assemble_cell(cfg, &up))
}

pub fn assemble_cell(cfg: &PackingConfig, up: &UpPattern) -> PeriodicPacking {
    let mut upward = vec![CellEllipse {
        ellipse: up.initial.ellipse.normalized(),
        provenance: Provenance { triangle: Orientation::Up, fan: None, tile: None },
    }];
    for (fi, fan) in up.fans.iter().enumerate() {
        for (ti, tile) in fan.tiling.tiles.iter().enumerate() {
            upward.push(CellEllipse {
                ellipse: tile.ellipse.normalized(),
                provenance: Provenance {
                    triangle: Orientation::Up,
                    fan: Some(fi),
                    tile: Some(ti),
                },
            });
        }
    }
    let turn = down_map(cfg.triangle_side);
    let downward: Vec<CellEllipse> = upward
        .iter()
        .map(|c| CellEllipse {
            ellipse: c.ellipse.transform(&turn).normalized(),
            provenance: Provenance { triangle: Orientation::Down, ..c.provenance },
        })
        .collect();
    let mut cell = upward;
    cell.extend(downward);
    PeriodicPacking {
        lambda: cfg.lambda,
        n: up.spec.n,
        triangle_side: cfg.triangle_side,
        lattice: lattice_basis(cfg.triangle_side),
        cell,
    }
}

/// Initial polygon of the downward triangle.
pub fn down_initial_vertices(up: &UpPattern, side: f64) -> Vec<Point2> {
    let turn = down_map(side);
    up.initial.polygon.vertices().iter().map(|&p| turn.apply(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipse::interiors_disjoint;

    #[test]
    fn fan_pockets_octagon() {
        let spec = reference_polygon(4).unwrap();
        let t = up_triangle(1.0);
        let tile = properly_inscribe(&t, &spec).unwrap();
        let fans = fan_pockets(&t, &tile, &spec).unwrap();
        assert_eq!(fans.len(), 6);
        let sum: f64 = fans.iter().map(|f| f.area()).sum();
        assert!((sum - (t.area() - tile.polygon.area())).abs() < 1e-12);
        let w = tile.polygon.vertices();
        for (i, f) in fans.iter().enumerate() {
            assert_eq!(f.base_start(), w[i + 2]);
            assert_eq!(f.base_end(), w[i + 1]);
        }
    }

    #[test]
    fn fan_pockets_square() {
        let spec = reference_polygon(2).unwrap();
        let t = up_triangle(1.0);
        let tile = properly_inscribe(&t, &spec).unwrap();
        assert_eq!(fan_pockets(&t, &tile, &spec).unwrap().len(), 2);
    }

    #[test]
    fn reference_delta_for_octagon() {
        let spec = reference_polygon(4).unwrap();
        let tile = properly_inscribe(&spec.reference_triangle, &spec).unwrap();
        let d = choose_delta(&tile, 1.1).unwrap();
        assert!((d - 0.5 * (1.1 - circumradius(4))).abs() < 1e-12);
        assert!((d - 0.008804).abs() < 1e-6);
        let boundary = choose_delta(&tile, circumradius(4));
        assert!(matches!(boundary, Err(Error::Configuration(_))));
    }

    #[test]
    fn config_validation() {
        assert!(PackingConfig::new(0.9).validate().is_err());
        let mut c = PackingConfig::new(1.1);
        c.n_override = Some(3);
        assert!(matches!(c.validate(), Err(Error::Configuration(_))));
        c.n_override = Some(6);
        assert_eq!(c.validate().unwrap(), 6);
    }

    #[test]
    fn provenance_round_trip() {
        for p in [
            Provenance { triangle: Orientation::Up, fan: None, tile: None },
            Provenance { triangle: Orientation::Down, fan: Some(3), tile: Some(41) },
        ] {
            assert_eq!(p.to_string().parse::<Provenance>().unwrap(), p);
        }
        assert!("sideways/initial".parse::<Provenance>().is_err());
    }

    #[test]
    fn square_cell_is_a_packing() {
        let cell = build_cell(&PackingConfig::new(1.5)).unwrap();
        assert_eq!(cell.n, 2);
        let all = cell.with_neighbors();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert!(interiors_disjoint(&all[i], &all[j], 1e-9).is_packable(), "{i} {j}");
            }
        }
        assert!(cell.stats().max_diameter <= 1.0);
    }
}
