//! Greedy tiling of a triangle, minus a strip along its base, by properly
//! inscribed copies of the 2n-gon.
//!
//! All work happens in the root triangle's base frame (base on the x-axis,
//! apex above), where a pending triangle's height is its apex ordinate.
//! Results are mapped back to the caller's coordinates at the end.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::geom::{AffineMap2, Point2, Triangle, Vec2};
use crate::inscription::{properly_inscribe, vertex_height_fraction, ProperTile, RegularGonSpec};

/// Default cap on the number of tiles one `tile_until` call may place.
pub const DEFAULT_TILE_BUDGET: usize = 1_000_000;

/// Distinct pocket heights explored by the forecast before it gives up and
/// reports a lower bound.
const FORECAST_STATE_LIMIT: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TilerOptions {
    pub max_tiles: usize,
}

impl Default for TilerOptions {
    fn default() -> Self {
        TilerOptions {
            max_tiles: DEFAULT_TILE_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
struct Pending {
    height: f64,
    id: u64,
    tri: Triangle,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // Max-heap: taller first, then the earlier-created one.
    fn cmp(&self, other: &Self) -> Ordering {
        self.height
            .total_cmp(&other.height)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Snapshot of the greedy procedure. Coordinates are in [`TilingState::frame`].
#[derive(Debug, Clone)]
pub struct TilingState {
    frame: AffineMap2,
    root: Triangle,
    placed: Vec<ProperTile>,
    pending: BinaryHeap<Pending>,
    next_id: u64,
    step: usize,
}

impl TilingState {
    pub fn new(t: &Triangle) -> Result<Self> {
        let frame = t.base_frame();
        let mut root = t.map(&frame);
        // Snap the base exactly onto the axis.
        let (s, e) = (root.base, (root.base + 1) % 3);
        root.v[s] = Vec2::new(0.0, 0.0);
        root.v[e] = Vec2::new(root.v[e].x, 0.0);
        let root = Triangle::new(root.v, root.base)?;
        let mut pending = BinaryHeap::new();
        pending.push(Pending {
            height: root.apex().y,
            id: 0,
            tri: root,
        });
        Ok(TilingState {
            frame,
            root,
            placed: Vec::new(),
            pending,
            next_id: 1,
            step: 0,
        })
    }

    /// Rigid map from caller coordinates into the working frame.
    pub fn frame(&self) -> &AffineMap2 {
        &self.frame
    }

    pub fn root(&self) -> &Triangle {
        &self.root
    }

    pub fn placed(&self) -> &[ProperTile] {
        &self.placed
    }

    pub fn pending(&self) -> impl Iterator<Item = &Triangle> {
        self.pending.iter().map(|p| &p.tri)
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Largest apex height among pending triangles (0 when none remain).
    pub fn y_max(&self) -> f64 {
        self.pending.peek().map_or(0.0, |p| p.height)
    }

    /// Number of pending triangles strictly taller than `threshold`.
    pub fn pending_above(&self, threshold: f64) -> usize {
        self.pending.iter().filter(|p| p.height > threshold).count()
    }

    /// Tiles a tallest pending triangle and replaces it by its pockets.
    pub fn next_tile(&mut self, spec: &RegularGonSpec) -> Result<()> {
        let top = self
            .pending
            .pop()
            .ok_or_else(|| Error::InvalidState("no pending triangle to tile".into()))?;
        let tile = properly_inscribe(&top.tri, spec)?;
        for pocket in pockets_in_frame(&top.tri, &tile, spec.n)? {
            if pocket.apex().y > top.height {
                return Err(Error::Internal("pocket taller than its parent".into()));
            }
            self.pending.push(Pending {
                height: pocket.apex().y,
                id: self.next_id,
                tri: pocket,
            });
            self.next_id += 1;
        }
        self.placed.push(tile);
        self.step += 1;
        Ok(())
    }

    /// Maps everything back to caller coordinates.
    pub fn into_result(self, delta: f64) -> Result<TilingResult> {
        let back = self.frame.inverse()?;
        let mut residual: Vec<(u64, Triangle)> =
            self.pending.into_iter().map(|p| (p.id, p.tri.map(&back))).collect();
        residual.sort_by_key(|&(id, _)| id);
        Ok(TilingResult {
            tiles: self.placed.iter().map(|t| transform_tile(t, &back)).collect(),
            residual: residual.into_iter().map(|(_, t)| t).collect(),
            delta,
        })
    }
}

fn transform_tile(t: &ProperTile, f: &AffineMap2) -> ProperTile {
    ProperTile {
        polygon: t.polygon.map(f),
        ellipse: t.ellipse.transform(f),
        source: t.source.map(f),
        map: f.compose(&t.map),
    }
}

#[derive(Debug, Clone)]
pub struct TilingResult {
    pub tiles: Vec<ProperTile>,
    /// Untiled triangles, all of apex height at most `delta` over the base.
    pub residual: Vec<Triangle>,
    pub delta: f64,
}

/// The `2n - 2` triangles partitioning `t` minus `tile`, each with its base on
/// the base of `t` and its apex at a non-extreme vertex of the tile.
pub fn pockets(t: &Triangle, tile: &ProperTile, spec: &RegularGonSpec) -> Result<Vec<Triangle>> {
    let frame = t.base_frame();
    let back = frame.inverse()?;
    let mut local = t.map(&frame);
    let (s, e) = (local.base, (local.base + 1) % 3);
    local.v[s].y = 0.0;
    local.v[e].y = 0.0;
    let local_tile = transform_tile(tile, &frame);
    Ok(pockets_in_frame(&local, &local_tile, spec.n)?
        .into_iter()
        .map(|p| p.map(&back))
        .collect())
}

/// Pockets for a triangle whose base lies on `y = 0`.
///
/// On the left, `X_0` is the base start and `X_k` is where the line through
/// tile edge `(w_k, w_{k+1})` meets the base; pocket `k` is `(X_{k-1}, X_k, w_k)`.
/// The last crossing is the tile's bottom vertex. The right side mirrors this.
/// Each crossing is computed once and shared by the two pockets that meet there.
fn pockets_in_frame(t: &Triangle, tile: &ProperTile, n: usize) -> Result<Vec<Triangle>> {
    let w = tile.polygon.vertices();
    let m = 2 * n;
    let bottom = Vec2::new(0.5 * (t.base_start().x + t.base_end().x), 0.0);
    let cross = |p: Point2, q: Point2| -> Point2 {
        Vec2::new(p.x + (q.x - p.x) * p.y / (p.y - q.y), 0.0)
    };
    let mut out = Vec::with_capacity(m - 2);
    let mut prev = Vec2::new(t.base_start().x, 0.0);
    for k in 1..n {
        let next = if k + 1 == n { bottom } else { cross(w[k], w[k + 1]) };
        out.push(Triangle::with_base(prev, next, w[k]).map_err(pocket_error)?);
        prev = next;
    }
    let mut prev = Vec2::new(t.base_end().x, 0.0);
    for k in 1..n {
        let j = m - k;
        let next = if k + 1 == n { bottom } else { cross(w[j], w[j - 1]) };
        out.push(Triangle::with_base(next, prev, w[j]).map_err(pocket_error)?);
        prev = next;
    }
    Ok(out)
}

fn pocket_error(e: Error) -> Error {
    Error::Internal(format!("degenerate pocket: {e}"))
}

pub fn tile_until(t: &Triangle, delta: f64, spec: &RegularGonSpec) -> Result<TilingResult> {
    tile_until_with(t, delta, spec, &TilerOptions::default())
}

/// Runs the greedy step until every pending apex is within `delta` of the base.
///
/// Fails fast with [`Error::TileBudget`] when the exact tile count, known in
/// advance from the pocket height ratios, exceeds `opts.max_tiles`.
pub fn tile_until_with(
    t: &Triangle,
    delta: f64,
    spec: &RegularGonSpec,
    opts: &TilerOptions,
) -> Result<TilingResult> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let forecast = forecast_tile_count(spec.n, t.height(), delta);
    if forecast > opts.max_tiles as u128 {
        return Err(Error::TileBudget {
            forecast,
            budget: opts.max_tiles,
        });
    }
    let mut state = TilingState::new(t)?;
    while state.y_max() > delta {
        state.next_tile(spec)?;
    }
    state.into_result(delta)
}

/// Number of tiles `tile_until` places on a triangle of height `height`.
///
/// A tile in a triangle of height `H` creates two pockets of height
/// `f_k H` for each `k = 1..n-1`, with `f_k` the vertex height fractions, so
/// `N(H) = [H > δ] (1 + Σ_k 2 N(f_k H))`. Heights are products of the `f_k`
/// and the recursion is memoised on exponent vectors. If the number of
/// distinct heights exceeds an internal limit the result is a lower bound
/// that already exceeds any practical budget.
pub fn forecast_tile_count(n: usize, height: f64, delta: f64) -> u128 {
    if !(delta > 0.0) || !(height > delta) {
        return 0;
    }
    let factors: Vec<f64> = (1..n).map(|k| vertex_height_fraction(n, k)).collect();
    let mut memo: HashMap<Vec<u16>, u128> = HashMap::new();
    let mut exps = vec![0u16; n - 1];
    let mut saturated = false;
    let count = forecast_rec(&factors, height, delta, &mut exps, &mut memo, &mut saturated);
    if saturated {
        count.max(FORECAST_STATE_LIMIT as u128)
    } else {
        count
    }
}

fn forecast_rec(
    factors: &[f64],
    height: f64,
    delta: f64,
    exps: &mut Vec<u16>,
    memo: &mut HashMap<Vec<u16>, u128>,
    saturated: &mut bool,
) -> u128 {
    let h = exps
        .iter()
        .zip(factors)
        .fold(height, |acc, (&e, &f)| acc * f.powi(e as i32));
    if h <= delta {
        return 0;
    }
    if let Some(&c) = memo.get(exps.as_slice()) {
        return c;
    }
    if *saturated || memo.len() >= FORECAST_STATE_LIMIT {
        *saturated = true;
        return 1;
    }
    let mut total: u128 = 1;
    for k in 0..exps.len() {
        exps[k] += 1;
        let sub = forecast_rec(factors, height, delta, exps, memo, saturated);
        exps[k] -= 1;
        total = total.saturating_add(sub.saturating_mul(2));
    }
    memo.insert(exps.clone(), total);
    total
}
