//! Independent checks of a finished packing: pairwise interior-disjointness
//! and coverage of a region by the enlarged ellipses.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ellipse::{interiors_disjoint, Contact, Ellipse};
use crate::error::{Error, Result};
use crate::geom::{Aabb, Point2, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub ok: bool,
    /// Index pairs `(i, j)`, `i < j`, whose interiors overlap.
    pub overlapping: Vec<(usize, usize)>,
    pub tangent_pairs: usize,
    pub exact_tests: usize,
}

/// Lower bound on the contact scale of two ellipses from projections onto a
/// few axes: along a unit `n` they separate at every scale below
/// `n·(c_j - c_i) / (|L_i^T n| + |L_j^T n|)`.
fn projected_scale_bound(a: &Ellipse, b: &Ellipse, minor_a: Vec2, minor_b: Vec2) -> f64 {
    let d = b.center() - a.center();
    let along = |n: Vec2| n.dot(d).abs() / (half_width(a, n) + half_width(b, n));
    let mut best = along(minor_a).max(along(minor_b));
    if d.norm() > 0.0 {
        best = best.max(along(d.normalized()));
    }
    best
}

/// Half the extent of `e` along the unit direction `n`.
fn half_width(e: &Ellipse, n: Vec2) -> f64 {
    e.map().linear.transpose().apply(n).norm()
}

/// Uniform grid of bounding boxes (cell size: median box extent); every
/// ellipse is entered in each cell its box touches.
fn box_buckets(boxes: &[Aabb]) -> (f64, HashMap<(i64, i64), Vec<usize>>) {
    let mut extents: Vec<f64> = boxes.iter().map(|b| b.width().max(b.height())).collect();
    let size = if extents.is_empty() {
        1.0
    } else {
        let mid = extents.len() / 2;
        *extents.select_nth_unstable_by(mid, f64::total_cmp).1
    }
    .max(f64::MIN_POSITIVE);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, b) in boxes.iter().enumerate() {
        let (lo, hi) = (bucket_key(size, b.min), bucket_key(size, b.max));
        for kx in lo.0..=hi.0 {
            for ky in lo.1..=hi.1 {
                buckets.entry((kx, ky)).or_default().push(i);
            }
        }
    }
    (size, buckets)
}

fn bucket_key(size: f64, p: Point2) -> (i64, i64) {
    ((p.x / size).floor() as i64, (p.y / size).floor() as i64)
}

/// Candidate pairs of one bucket by sweep-and-prune along the normal of the
/// members' dominant direction: stacks of thin, nearly parallel ellipses
/// project to short, mostly disjoint intervals.
fn bucket_pairs(
    members: &[usize],
    ellipses: &[Ellipse],
    majors: &[(f64, f64)],
    grow: f64,
    mut visit: impl FnMut(usize, usize),
) {
    // Doubled-angle mean of the major axes, weighted by length.
    let (mut sx, mut sy) = (0.0, 0.0);
    for &i in members {
        let (angle, a) = majors[i];
        sx += a * (2.0 * angle).cos();
        sy += a * (2.0 * angle).sin();
    }
    let theta = 0.5 * sy.atan2(sx);
    let n = Vec2::new(-theta.sin(), theta.cos());
    let mut spans: Vec<(f64, f64, usize)> = members
        .iter()
        .map(|&i| {
            let c = n.dot(ellipses[i].center());
            let w = grow * half_width(&ellipses[i], n);
            (c - w, c + w, i)
        })
        .collect();
    spans.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(&y.2)));
    for (k, &(_, hi, i)) in spans.iter().enumerate() {
        for &(lo, _, j) in &spans[k + 1..] {
            if lo > hi {
                break;
            }
            visit(i, j);
        }
    }
}

pub fn verify_packing(ellipses: &[Ellipse], tol: f64) -> PackingReport {
    // Pairs with contact scale up to 1 + tol still count (as tangent), so
    // boxes and sweep intervals are taken for the ellipses grown by 1 + tol.
    let grow = 1.0 + tol.max(0.0);
    let boxes: Vec<Aabb> = ellipses
        .iter()
        .map(|e| {
            let b = e.bbox();
            let h = Vec2::new(0.5 * b.width(), 0.5 * b.height()) * grow;
            Aabb::new(e.center() - h, e.center() + h)
        })
        .collect();
    let canon: Vec<_> = ellipses.iter().map(|e| e.canonical()).collect();
    let majors: Vec<(f64, f64)> = canon.iter().map(|c| (c.angle, c.semi_major)).collect();
    let minors: Vec<Vec2> = canon.iter().map(|c| Vec2::new(-c.angle.sin(), c.angle.cos())).collect();
    let (size, buckets) = box_buckets(&boxes);
    let buckets: Vec<(&(i64, i64), &Vec<usize>)> = buckets.iter().collect();
    // (overlapping pairs, tangent pairs, exact tests) per bucket.
    type BucketTally = (Vec<(usize, usize)>, usize, usize);
    let per_bucket: Vec<BucketTally> = buckets
        .par_iter()
        .map(|&(&key, members)| {
            let mut bad = Vec::new();
            let (mut tangent, mut tests) = (0, 0);
            bucket_pairs(members, ellipses, &majors, grow, |i, j| {
                let (bi, bj) = (&boxes[i], &boxes[j]);
                if !bi.intersects(bj) {
                    return;
                }
                // Each pair is handled in the bucket holding the low corner
                // of the two boxes' overlap.
                let corner = Vec2::new(bi.min.x.max(bj.min.x), bi.min.y.max(bj.min.y));
                if bucket_key(size, corner) != key {
                    return;
                }
                // Cheap certificate of clear separation first.
                if projected_scale_bound(&ellipses[i], &ellipses[j], minors[i], minors[j]) > 1.0 + tol {
                    return;
                }
                tests += 1;
                match interiors_disjoint(&ellipses[i], &ellipses[j], tol) {
                    Contact::Overlap => bad.push((i.min(j), i.max(j))),
                    Contact::Tangent => tangent += 1,
                    Contact::Disjoint => {}
                }
            });
            (bad, tangent, tests)
        })
        .collect();
    let mut report = PackingReport {
        ok: true,
        overlapping: Vec::new(),
        tangent_pairs: 0,
        exact_tests: 0,
    };
    for (bad, tangent, tests) in per_bucket {
        report.overlapping.extend(bad);
        report.tangent_pairs += tangent;
        report.exact_tests += tests;
    }
    report.overlapping.sort_unstable();
    report.ok = report.overlapping.is_empty();
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// The cell center lies outside every enlarged ellipse.
    Uncovered,
    /// The center is covered but no single enlarged ellipse contains the cell.
    NeedsRefinement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedCell {
    pub cell: Aabb,
    pub status: CellStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub ellipse_count: usize,
    pub min_width: f64,
    pub max_diameter: f64,
    pub certified_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub region: Aabb,
    pub min_cell: f64,
    pub uncovered_cells: Vec<FlaggedCell>,
    pub certified: bool,
    pub stats: CoverageStats,
}

impl CoverageReport {
    pub fn count(&self, status: CellStatus) -> usize {
        self.uncovered_cells.iter().filter(|c| c.status == status).count()
    }
}

/// Relative slack (in the unit-disc frame) required for a corner to count as
/// inside an enlarged ellipse.
const CORNER_STRICTNESS: f64 = 1e-12;

/// Buckets of enlarged ellipses keyed by the grid cells their boxes overlap.
struct CoverIndex<'a> {
    ellipses: &'a [Ellipse],
    origin: Point2,
    size: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> CoverIndex<'a> {
    fn new(ellipses: &'a [Ellipse], region: &Aabb) -> Self {
        // Mean diameter keeps buckets short; large ellipses simply span
        // several buckets.
        let relevant: Vec<f64> = ellipses
            .iter()
            .filter(|e| e.bbox().intersects(region))
            .map(|e| e.diameter())
            .collect();
        let mean = relevant.iter().sum::<f64>() / relevant.len().max(1) as f64;
        let size = mean.max(region.diagonal() / 4096.0).max(f64::MIN_POSITIVE);
        let origin = region.min;
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, e) in ellipses.iter().enumerate() {
            let b = e.bbox();
            if !b.intersects(region) {
                continue;
            }
            let lo = Self::key(origin, size, b.min);
            let hi = Self::key(origin, size, b.max);
            for kx in lo.0..=hi.0 {
                for ky in lo.1..=hi.1 {
                    buckets.entry((kx, ky)).or_default().push(i);
                }
            }
        }
        CoverIndex { ellipses, origin, size, buckets }
    }

    fn key(origin: Point2, size: f64, p: Point2) -> (i64, i64) {
        (
            ((p.x - origin.x) / size).floor() as i64,
            ((p.y - origin.y) / size).floor() as i64,
        )
    }

    /// Every ellipse containing `p` is in the returned bucket.
    fn candidates(&self, p: Point2) -> &[usize] {
        self.buckets
            .get(&Self::key(self.origin, self.size, p))
            .map_or(&[], |v| v.as_slice())
    }

    fn certify(&self, cell: &Aabb) -> Option<usize> {
        let corners = cell.corners();
        let inside = |i: usize| {
            let e = &self.ellipses[i];
            corners
                .iter()
                .all(|&c| e.to_unit(c).norm_sq() < (1.0 - CORNER_STRICTNESS) * (1.0 - CORNER_STRICTNESS))
        };
        self.candidates(cell.center()).iter().copied().find(|&i| inside(i))
    }

    fn covers_point(&self, p: Point2) -> bool {
        self.candidates(p)
            .iter()
            .any(|&i| self.ellipses[i].to_unit(p).norm_sq() <= 1.0)
    }

    /// Returns (certified leaf count, flagged leaves) for `cell`.
    fn subdivide(&self, cell: Aabb, min_cell: f64) -> (usize, Vec<FlaggedCell>) {
        if self.certify(&cell).is_some() {
            return (1, Vec::new());
        }
        if cell.width().max(cell.height()) < min_cell {
            let status = if self.covers_point(cell.center()) {
                CellStatus::NeedsRefinement
            } else {
                CellStatus::Uncovered
            };
            return (0, vec![FlaggedCell { cell, status }]);
        }
        let c = cell.center();
        let quads = [
            Aabb::new(cell.min, c),
            Aabb::new(Vec2::new(c.x, cell.min.y), Vec2::new(cell.max.x, c.y)),
            Aabb::new(Vec2::new(cell.min.x, c.y), Vec2::new(c.x, cell.max.y)),
            Aabb::new(c, cell.max),
        ];
        let mut count = 0;
        let mut flagged = Vec::new();
        for q in quads {
            let (k, f) = self.subdivide(q, min_cell);
            count += k;
            flagged.extend(f);
        }
        (count, flagged)
    }
}

/// Adaptive quadtree check that the `lambda`-enlargements of `ellipses` cover
/// `region`. A cell is certified when its four corners lie strictly inside a
/// single enlarged ellipse, which by convexity puts the whole cell inside.
pub fn verify_covering(ellipses: &[Ellipse], lambda: f64, region: Aabb, min_cell: f64) -> Result<CoverageReport> {
    if !(min_cell > 0.0) || !min_cell.is_finite() {
        return Err(Error::InvalidArgument(format!("min_cell must be positive, got {min_cell}")));
    }
    if !(region.width() > 0.0 && region.height() > 0.0) {
        return Err(Error::InvalidArgument("region must have positive area".into()));
    }
    let enlarged: Vec<Ellipse> = ellipses
        .iter()
        .map(|e| e.enlarge(lambda))
        .collect::<Result<_>>()?;
    let index = CoverIndex::new(&enlarged, &region);

    // Seed cells no larger than a bucket, processed in parallel.
    let step = index.size.min(region.diagonal() / 64.0);
    let nx = (region.width() / step).ceil().clamp(1.0, 4096.0) as usize;
    let ny = (region.height() / step).ceil().clamp(1.0, 4096.0) as usize;
    let (dx, dy) = (region.width() / nx as f64, region.height() / ny as f64);
    let seeds: Vec<Aabb> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            let min = Vec2::new(region.min.x + i as f64 * dx, region.min.y + j as f64 * dy);
            let max = Vec2::new(
                if i + 1 == nx { region.max.x } else { min.x + dx },
                if j + 1 == ny { region.max.y } else { min.y + dy },
            );
            Aabb::new(min, max)
        })
        .collect();
    let results: Vec<(usize, Vec<FlaggedCell>)> = seeds
        .into_par_iter()
        .map(|s| index.subdivide(s, min_cell))
        .collect();

    let mut certified_cells = 0;
    let mut uncovered_cells = Vec::new();
    for (k, f) in results {
        certified_cells += k;
        uncovered_cells.extend(f);
    }
    let (min_width, max_diameter) = ellipses.iter().fold((f64::INFINITY, 0.0_f64), |(w, d), e| {
        let (a, b) = e.semi_axes();
        (w.min(2.0 * b), d.max(2.0 * a))
    });
    Ok(CoverageReport {
        region,
        min_cell,
        certified: uncovered_cells.is_empty(),
        uncovered_cells,
        stats: CoverageStats {
            ellipse_count: ellipses.len(),
            min_width,
            max_diameter,
            certified_cells,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(x: f64, y: f64, r: f64) -> Ellipse {
        Ellipse::circle(Vec2::new(x, y), r).unwrap()
    }

    #[test]
    fn tangent_discs_pack() {
        let r = verify_packing(&[disc(0.0, 0.0, 1.0), disc(2.0, 0.0, 1.0)], 1e-9);
        assert!(r.ok);
        assert_eq!(r.tangent_pairs, 1);
    }

    #[test]
    fn overlapping_discs_reported() {
        let r = verify_packing(
            &[disc(0.0, 0.0, 1.0), disc(5.0, 5.0, 1.0), disc(1.99, 0.0, 1.0)],
            1e-9,
        );
        assert!(!r.ok);
        assert_eq!(r.overlapping, vec![(0, 2)]);
    }

    #[test]
    fn generous_enlargement_covers_square() {
        let region = Aabb::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5));
        let r = verify_covering(&[disc(0.0, 0.0, 1.0)], 2.0, region, 1e-3).unwrap();
        assert!(r.certified);
        assert!(r.uncovered_cells.is_empty());
    }

    #[test]
    fn corners_of_large_square_are_uncovered() {
        let region = Aabb::new(Vec2::new(-2.0, -2.0), Vec2::new(2.0, 2.0));
        let r = verify_covering(&[disc(0.0, 0.0, 1.0)], 1.1, region, 0.05).unwrap();
        assert!(!r.certified);
        assert!(r.count(CellStatus::Uncovered) > 0);
        let corner = Vec2::new(1.9, 1.9);
        assert!(r
            .uncovered_cells
            .iter()
            .any(|c| c.status == CellStatus::Uncovered && c.cell.center().dist(corner) < 0.2));
    }

    #[test]
    fn rejects_bad_min_cell() {
        let region = Aabb::new(Vec2::ZERO, Vec2::new(1.0, 1.0));
        assert!(verify_covering(&[], 1.1, region, 0.0).is_err());
    }

    #[test]
    fn empty_input_is_trivially_packed_and_uncovered() {
        assert!(verify_packing(&[], 1e-9).ok);
        let region = Aabb::new(Vec2::ZERO, Vec2::new(1.0, 1.0));
        let r = verify_covering(&[], 1.1, region, 0.5).unwrap();
        assert!(!r.certified);
    }
}
