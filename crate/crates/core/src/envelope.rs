//! Quasi-concave envelopes and Minkowski combinations of grid functions.
//!
//! The envelope `u*` of `u` is the function whose superlevel sets are the
//! convex hulls of the superlevel sets of `u`. On a grid it is computed on a
//! ladder of thresholds `t_k = min u + k·(max u - min u)/levels`: every node
//! receives the largest `t_k` whose hull contains it. The result is below the
//! exact envelope by less than one ladder step.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::ConvexBody;
use crate::hull::{self, Point};
use crate::pde::{PotentialField, RingMesh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no node reaches level {0}")]
    EmptyLevel(f64),
    #[error("no sampled triple contains the query point")]
    NoTriple,
    #[error("input is not quasi-concave (envelope exceeds it by {0})")]
    NotQuasiConcave(f64),
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("at least one ladder interval is required")]
    TooFewLevels,
}

type Result<T> = std::result::Result<T, EnvelopeError>;

/// Nodal values on `origin + spacing·(ix, iy)`, stored row by row
/// (`iy·nx + ix`). `-∞` marks nodes outside the function's domain.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    origin: Point,
    spacing: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(origin: Point, spacing: f64, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(EnvelopeError::InvalidGrid(format!("spacing {spacing} must be positive")));
        }
        if nx == 0 || ny == 0 || values.len() != nx * ny {
            return Err(EnvelopeError::InvalidGrid(format!("{} values for a {nx} x {ny} grid", values.len())));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(EnvelopeError::InvalidGrid("values must be finite or -inf".into()));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(EnvelopeError::InvalidGrid("no finite value".into()));
        }
        Ok(Self { origin, spacing, nx, ny, values })
    }

    pub fn from_fn(origin: Point, spacing: f64, nx: usize, ny: usize, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = (0..nx * ny).map(|k| f(origin + spacing * Point::new((k % nx) as f64, (k / nx) as f64))).collect();
        Self::new(origin, spacing, nx, ny, values)
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn node(&self, ix: usize, iy: usize) -> Point {
        self.origin + self.spacing * Point::new(ix as f64, iy as f64)
    }

    /// Smallest and largest finite value.
    pub fn finite_range(&self) -> (f64, f64) {
        self.values.iter().filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.origin == other.origin && self.spacing == other.spacing && self.nx == other.nx && self.ny == other.ny
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { values, ..self.clone() }
    }

    /// Pointwise maximum of two functions on the same grid.
    pub fn max(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(EnvelopeError::GridMismatch);
        }
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a.max(*b)).collect()))
    }

    /// Largest absolute difference over nodes where both are finite; nodes
    /// where exactly one of them is finite count as infinitely far apart.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(EnvelopeError::GridMismatch);
        }
        Ok(self.values.iter().zip(&other.values).fold(0.0, |acc: f64, (a, b)| match (a.is_finite(), b.is_finite()) {
            (true, true) => acc.max((a - b).abs()),
            (false, false) => acc,
            _ => f64::INFINITY,
        }))
    }

    /// Samples a capacitary potential on a Cartesian grid: 1 inside `K`, the
    /// mesh interpolant in the ring and 0 outside `Ω`.
    pub fn sample_ring(mesh: &RingMesh, field: &PotentialField, origin: Point, spacing: f64, nx: usize, ny: usize) -> Result<Self> {
        let sampler = RingSampler::new(mesh.nodes(), field.values(), mesh.angular_nodes(), mesh.radial_layers())?;
        Self::from_fn(origin, spacing, nx, ny, |x| sampler.eval(x))
    }

    /// [`GridFunction::sample_ring`] on an `n x n` grid covering the outer
    /// boundary with a margin of two cells.
    pub fn sample_ring_auto(mesh: &RingMesh, field: &PotentialField, n: usize) -> Result<Self> {
        let (lo, hi) = bounding_box(mesh.outer_points());
        let side = (hi.x - lo.x).max(hi.y - lo.y);
        let spacing = side / (n as f64 - 5.0).max(1.0);
        Self::sample_ring(mesh, field, lo - 2.0 * spacing * Point::new(1.0, 1.0), spacing, n, n)
    }
}

fn bounding_box(points: &[Point]) -> (Point, Point) {
    points.iter().fold((Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY)), |(lo, hi), p| {
        (Point::new(lo.x.min(p.x), lo.y.min(p.y)), Point::new(hi.x.max(p.x), hi.y.max(p.y)))
    })
}

/// Point location and piecewise linear interpolation on a ring mesh given
/// by its nodes (`j·m + i`, `j = 0` on the inner boundary).
pub struct RingSampler<'a> {
    nodes: &'a [Point],
    values: &'a [f64],
    m: usize,
    l: usize,
    inner: Vec<Point>,
    outer: Vec<Point>,
}

impl<'a> RingSampler<'a> {
    pub fn new(nodes: &'a [Point], values: &'a [f64], m: usize, l: usize) -> Result<Self> {
        if m < 3 || l < 2 || nodes.len() != m * l || values.len() != m * l {
            return Err(EnvelopeError::InvalidGrid(format!("ring data does not match {m} x {l} nodes")));
        }
        let inner = hull::monotone_chain(&nodes[..m]);
        let outer = hull::monotone_chain(&nodes[(l - 1) * m..]);
        Ok(Self { nodes, values, m, l, inner, outer })
    }

    fn node(&self, i: usize, j: usize) -> Point {
        self.nodes[j * self.m + i % self.m]
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.m + i % self.m]
    }

    pub fn eval(&self, x: Point) -> f64 {
        if hull::polygon_contains(&self.inner, x, 0.0) {
            return self.values[0];
        }
        if !hull::polygon_contains(&self.outer, x, 0.0) {
            return 0.0;
        }
        // angular strip: left of the line i, right of the line i + 1
        let side = |i: usize| {
            let a = self.node(i, 0);
            (self.node(i, self.l - 1) - a).cross(x - a)
        };
        let Some(i) = (0..self.m).find(|&i| side(i) >= 0.0 && side(i + 1) < 0.0) else {
            return self.nearest(x);
        };
        // radial layer: the segment (i, j)-(i+1, j) separates the strip
        let outward = |j: usize| {
            let a = self.node(i, j);
            (self.node(i + 1, j) - a).cross(x - a) <= 0.0
        };
        let (mut lo, mut hi) = (0, self.l - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if outward(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let corners = [(i, lo), (i + 1, lo), (i + 1, hi), (i, hi)];
        let pts = corners.map(|(a, b)| self.node(a, b));
        let vals = corners.map(|(a, b)| self.value(a, b));
        let tri =
            |a: usize, b: usize, c: usize| barycentric(x, pts[a], pts[b], pts[c]).map(|w| w[0] * vals[a] + w[1] * vals[b] + w[2] * vals[c]);
        tri(0, 1, 2).or_else(|| tri(0, 2, 3)).unwrap_or_else(|| self.nearest(x))
    }

    fn nearest(&self, x: Point) -> f64 {
        let k = (0..self.nodes.len()).min_by(|&a, &b| (self.nodes[a] - x).norm().total_cmp(&(self.nodes[b] - x).norm())).unwrap_or(0);
        self.values[k]
    }
}

fn barycentric(x: Point, a: Point, b: Point, c: Point) -> Option<[f64; 3]> {
    let area = (b - a).cross(c - a);
    if area.abs() < 1e-300 {
        return None;
    }
    let wa = (b - x).cross(c - x) / area;
    let wb = (c - x).cross(a - x) / area;
    let wc = 1.0 - wa - wb;
    let tol = -1e-9;
    (wa >= tol && wb >= tol && wc >= tol).then_some([wa, wb, wc])
}

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(EnvelopeError::InvalidWeights("empty".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(EnvelopeError::InvalidWeights("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(EnvelopeError::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(Self(weights))
    }

    /// `(1 - λ, λ)`.
    pub fn pair(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(EnvelopeError::InvalidWeights(format!("λ = {lambda} outside [0, 1]")));
        }
        Self::new(vec![1.0 - lambda, lambda])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }
}

/// Weighted harmonic mean `(Σ λ_k / grads_k)⁻¹`.
pub fn harmonic_gradient(lambda: &WeightVector, grads: &[f64]) -> Result<f64> {
    if grads.len() != lambda.0.len() {
        return Err(EnvelopeError::InvalidWeights(format!("{} weights for {} gradients", lambda.0.len(), grads.len())));
    }
    if grads.iter().any(|g| !(*g > 0.0)) {
        return Err(EnvelopeError::InvalidWeights("gradients must be positive".into()));
    }
    Ok(1.0 / lambda.0.iter().zip(grads).map(|(l, g)| l / g).sum::<f64>())
}

/// Convex hull of the nodes where `f ≥ t`.
pub fn superlevel_polygon(f: &GridFunction, t: f64) -> Result<Vec<Point>> {
    let points: Vec<Point> = (0..f.values.len()).filter(|&k| f.values[k] >= t).map(|k| f.node(k % f.nx, k / f.nx)).collect();
    if points.is_empty() {
        return Err(EnvelopeError::EmptyLevel(t));
    }
    Ok(hull::monotone_chain(&points))
}

/// Thresholds `t_0 < … < t_levels` spanning the finite range of `f`.
pub fn ladder(f: &GridFunction, levels: usize) -> Vec<f64> {
    let (lo, hi) = f.finite_range();
    (0..=levels).map(|k| if k == levels { hi } else { lo + (hi - lo) * k as f64 / levels as f64 }).collect()
}

/// `(max f - min f) / levels`.
pub fn ladder_step(f: &GridFunction, levels: usize) -> f64 {
    let (lo, hi) = f.finite_range();
    (hi - lo) / levels as f64
}

// Geometric slack for node-in-polygon decisions.
fn node_tol(f: &GridFunction) -> f64 {
    1e-9 * f.spacing
}

// Writes `t` into every node of `out` whose x-range intersects `span(iy)`.
fn fill_rows(f: &GridFunction, out: &mut [f64], t: f64, span: impl Fn(f64) -> Option<(f64, f64)>) {
    for iy in 0..f.ny {
        let y = f.origin.y + iy as f64 * f.spacing;
        let Some((a, b)) = span(y) else { continue };
        let first = ((a - f.origin.x) / f.spacing).ceil().max(0.0);
        let last = ((b - f.origin.x) / f.spacing).floor().min(f.nx as f64 - 1.0);
        if first > last {
            continue;
        }
        for ix in first as usize..=last as usize {
            out[iy * f.nx + ix] = t;
        }
    }
}

/// Ladder approximation of the quasi-concave envelope.
pub fn quasiconcave_envelope(f: &GridFunction, levels: usize) -> Result<GridFunction> {
    if levels == 0 {
        return Err(EnvelopeError::TooFewLevels);
    }
    let tol = node_tol(f);
    let mut out = vec![f64::NEG_INFINITY; f.values.len()];
    // hulls are nested, so ascending overwrites leave the largest level
    for t in ladder(f, levels) {
        let poly = superlevel_polygon(f, t)?;
        fill_rows(f, &mut out, t, |y| hull::row_interval(&poly, y, tol));
    }
    Ok(f.with_values(out))
}

/// Checks of an envelope against its input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub levels: usize,
    pub ladder_step: f64,
    /// `max (f - u*)` over finite nodes; dominance holds when it is at most
    /// one ladder step.
    pub dominance_gap: f64,
    pub dominance: bool,
    /// `sup |u** - u*|`.
    pub idempotence_gap: f64,
    pub idempotence: bool,
    /// Deepest node (in grid cells) inside a level hull of `u*` but below
    /// that level.
    pub superlevel_violation: f64,
    pub convex_superlevels: bool,
    pub already_quasiconcave: bool,
}

impl EnvelopeReport {
    pub fn passed(&self) -> bool {
        self.dominance && self.idempotence && self.convex_superlevels
    }
}

/// Depth of the worst superlevel convexity defect of `f`, in grid cells.
pub fn superlevel_violation(f: &GridFunction, levels: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for t in ladder(f, levels) {
        let poly = superlevel_polygon(f, t)?;
        if poly.len() < 3 {
            continue;
        }
        for (k, &v) in f.values.iter().enumerate() {
            if v >= t {
                continue;
            }
            let x = f.node(k % f.nx, k / f.nx);
            let depth = (0..poly.len())
                .map(|e| {
                    let a = poly[e];
                    let edge = poly[(e + 1) % poly.len()] - a;
                    edge.cross(x - a) / edge.norm()
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(depth / f.spacing);
        }
    }
    Ok(worst)
}

/// Computes the envelope of `f` and runs the dominance, idempotence and
/// convex-superlevel checks on it.
pub fn verify_envelope(f: &GridFunction, levels: usize) -> Result<(GridFunction, EnvelopeReport)> {
    let env = quasiconcave_envelope(f, levels)?;
    let step = ladder_step(f, levels);
    let slack = 1e-12 * (1.0 + step);
    let dominance_gap =
        f.values.iter().zip(&env.values).filter(|(v, _)| v.is_finite()).map(|(v, e)| v - e).fold(f64::NEG_INFINITY, f64::max);
    let twice = quasiconcave_envelope(&env, levels)?;
    let idempotence_gap = twice.sup_distance(&env)?;
    let violation = superlevel_violation(&env, levels)?;
    let excess = env.values.iter().zip(&f.values).filter(|(_, v)| v.is_finite()).map(|(e, v)| e - v).fold(0.0, f64::max);
    let report = EnvelopeReport {
        levels,
        ladder_step: step,
        dominance_gap,
        dominance: dominance_gap <= step + slack,
        idempotence_gap,
        idempotence: idempotence_gap <= step + slack,
        superlevel_violation: violation,
        convex_superlevels: violation <= 1.0,
        already_quasiconcave: excess <= step + slack,
    };
    Ok((env, report))
}

fn in_triangle(x: Point, a: Point, b: Point, c: Point, tol: f64) -> bool {
    let area = (b - a).cross(c - a);
    let scale = (b - a).norm().max((c - a).norm()).max((c - b).norm());
    if area.abs() <= 1e-12 * scale * scale {
        // degenerate: a point or a segment
        return hull::segment_distance(x, a, b) <= tol || hull::segment_distance(x, b, c) <= tol || hull::segment_distance(x, a, c) <= tol;
    }
    let s = area.signum();
    let edge = |p: Point, q: Point| s * (q - p).cross(x - p) / (q - p).norm() >= -tol;
    edge(a, b) && edge(b, c) && edge(c, a)
}

/// Brute-force `max min{f(x_1), f(x_2), f(x_3)}` over triples of strided
/// nodes whose triangle contains `x` (a node at `x` itself also counts).
///
/// Candidates are visited in decreasing value, so the first triple found
/// whose last member is the `k`-th candidate realises the maximum.
pub fn maxmin_representation(f: &GridFunction, x: Point, sample_stride: usize) -> Result<f64> {
    let stride = sample_stride.max(1);
    let tol = node_tol(f);
    let mut cands: Vec<(Point, f64)> = Vec::new();
    for iy in 0..f.ny {
        for ix in 0..f.nx {
            let v = f.value(ix, iy);
            let p = f.node(ix, iy);
            if v.is_finite() && ((ix % stride == 0 && iy % stride == 0) || (p - x).norm() <= tol) {
                cands.push((p, v));
            }
        }
    }
    cands.sort_by(|a, b| b.1.total_cmp(&a.1));
    for k in 0..cands.len() {
        let c = cands[k].0;
        for i in 0..=k {
            for j in i..=k {
                if in_triangle(x, cands[i].0, cands[j].0, c, tol) {
                    return Ok(cands[k].1);
                }
            }
        }
    }
    Err(EnvelopeError::NoTriple)
}

/// Combination `u_λ` whose level sets are `(1-λ){u0 ≥ t} + λ{u1 ≥ t}`.
///
/// Both inputs must be quasi-concave up to one ladder step. The ladder spans
/// the union of the two finite ranges; levels above either maximum are empty.
/// Each combined level set is represented through its support function on
/// the union of the edge normals of the two polygons, which describes the
/// Minkowski sum exactly.
pub fn minkowski_combine_potentials(u0: &GridFunction, u1: &GridFunction, lambda: f64, levels: usize) -> Result<GridFunction> {
    if !u0.same_grid(u1) {
        return Err(EnvelopeError::GridMismatch);
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(EnvelopeError::InvalidWeights(format!("λ = {lambda} outside [0, 1]")));
    }
    if levels == 0 {
        return Err(EnvelopeError::TooFewLevels);
    }
    for u in [u0, u1] {
        let env = quasiconcave_envelope(u, levels)?;
        let excess = env.values.iter().zip(&u.values).filter(|(_, v)| v.is_finite()).map(|(e, v)| e - v).fold(0.0, f64::max);
        if excess > ladder_step(u, levels) * (1.0 + 1e-9) + 1e-12 {
            return Err(EnvelopeError::NotQuasiConcave(excess));
        }
    }
    let (lo0, hi0) = u0.finite_range();
    let (lo1, hi1) = u1.finite_range();
    let (lo, hi) = (lo0.min(lo1), hi0.max(hi1));
    let tol = node_tol(u0);
    let mut out = vec![f64::NEG_INFINITY; u0.values.len()];
    for k in 0..=levels {
        let t = if k == levels { hi } else { lo + (hi - lo) * k as f64 / levels as f64 };
        let (Ok(p0), Ok(p1)) = (superlevel_polygon(u0, t), superlevel_polygon(u1, t)) else { break };
        let mut normals = hull::polygon_normals(&p0);
        normals.extend(hull::polygon_normals(&p1));
        let planes: Vec<(Point, f64)> = normals
            .into_iter()
            .map(|n| (n, (1.0 - lambda) * hull::polygon_support(&p0, n) + lambda * hull::polygon_support(&p1, n)))
            .collect();
        fill_rows(u0, &mut out, t, |y| half_plane_row(&planes, y, tol));
    }
    Ok(u0.with_values(out))
}

// x-interval of {x : n·(x, y) ≤ h for all (n, h)} on a horizontal line.
fn half_plane_row(planes: &[(Point, f64)], y: f64, tol: f64) -> Option<(f64, f64)> {
    let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
    for &(n, h) in planes {
        let rhs = h + tol - n.y * y;
        if n.x.abs() < 1e-14 {
            if rhs < 0.0 {
                return None;
            }
        } else if n.x > 0.0 {
            b = b.min(rhs / n.x);
        } else {
            a = a.max(rhs / n.x);
        }
    }
    (a <= b).then_some((a, b))
}

/// Support-function inclusion check of `(1-λ)K0 + λK1 ⊆ Kλ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    /// `min_i (h_{Kλ,i} - h_{comb,i})`.
    pub margin: f64,
    pub worst_theta: f64,
    pub margins: Vec<f64>,
}

impl InclusionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

pub fn check_combination_inclusion(
    k0: &ConvexBody,
    k1: &ConvexBody,
    k_lambda: &ConvexBody,
    lambda: f64,
) -> std::result::Result<InclusionReport, crate::geometry::GeometryError> {
    let comb = k0.minkowski_combine(k1, lambda)?;
    if k_lambda.grid_size() != comb.grid_size() {
        return Err(crate::geometry::GeometryError::GridMismatch(k_lambda.grid_size(), comb.grid_size()));
    }
    let margins: Vec<f64> = k_lambda.support().iter().zip(comb.support()).map(|(a, b)| a - b).collect();
    let (worst, margin) = margins.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    Ok(InclusionReport { margin, worst_theta: k_lambda.theta(worst), margins })
}
