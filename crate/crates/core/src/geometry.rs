//! Planar convex bodies stored as sampled support functions.
//!
//! A body is the list of support values `h_i = h(θ_i)` on the uniform periodic
//! grid `θ_i = 2πi/M`. Minkowski combination and convex hull of a union are
//! then pointwise affine combination and pointwise maximum. Boundary points are
//! recovered from `x(θ) = h(θ)·e(θ) + h'(θ)·e'(θ)` with a centered difference
//! for `h'`.
//!
//! The discrete convexity condition used throughout is
//! `(h_{i-1} - 2h_i + h_{i+1})/Δθ² + h_i ≥ -tol`, the sampled version of a
//! nonnegative radius of curvature.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hull::{self, Point};

/// Smallest admissible angular grid.
pub const MIN_GRID: usize = 16;

/// Default angular grid size.
pub const DEFAULT_GRID: usize = 256;

/// Relative tolerance of the discrete convexity invariant.
pub const CONVEXITY_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("angular grid size {0} must be even and at least {MIN_GRID}")]
    InvalidGrid(usize),
    #[error("support value {value} at index {index} is not a positive finite number")]
    InvalidSupport { index: usize, value: f64 },
    #[error("convex hull of the boundary points has empty interior")]
    DegenerateBody,
    #[error("angular grids differ ({0} vs {1})")]
    GridMismatch(usize, usize),
    #[error("combination weight {0} is outside [0, 1]")]
    InvalidWeight(f64),
    #[error("boundary constraint must stay positive (got minimum {0})")]
    NonPositiveConstraint(f64),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A unit normal direction, stored by its angle in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    angle: f64,
}

impl Direction {
    pub fn new(angle: f64) -> Self {
        let a = angle.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU
        Self { angle: if a >= TAU { 0.0 } else { a } }
    }

    /// The `i`-th normal of an `m`-point grid.
    pub fn grid(i: usize, m: usize) -> Self {
        Self::new(TAU * (i % m) as f64 / m as f64)
    }

    pub fn angle(self) -> f64 {
        self.angle
    }

    pub fn unit(self) -> Point {
        Point::polar(self.angle)
    }
}

fn check_grid(m: usize) -> Result<()> {
    if m < MIN_GRID || !m.is_multiple_of(2) {
        return Err(GeometryError::InvalidGrid(m));
    }
    Ok(())
}

fn grid_angle(i: usize, m: usize) -> f64 {
    TAU * i as f64 / m as f64
}

/// A convex body given by support values on a uniform angle grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody {
    h: Vec<f64>,
}

impl ConvexBody {
    /// Builds a body from raw support values, projecting them onto the
    /// discrete convexity cone when needed.
    pub fn from_support(values: &[f64]) -> Result<Self> {
        Self::convexify(values).map(|(body, _)| body)
    }

    /// Same as [`ConvexBody::from_support`], also returning the largest change
    /// made to any support value.
    pub fn convexify(values: &[f64]) -> Result<(Self, f64)> {
        Self::project(values, true)
    }

    /// Convexification without the recentring step: the body keeps its
    /// position, so some support values may be nonpositive when the origin
    /// lies outside it. Used where the placement relative to another body
    /// matters (homothetic copies, free boundary updates).
    pub fn convexify_in_place(values: &[f64]) -> Result<(Self, f64)> {
        Self::project(values, false)
    }

    fn project(values: &[f64], recentre: bool) -> Result<(Self, f64)> {
        let m = values.len();
        check_grid(m)?;
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(GeometryError::InvalidSupport { index, value });
            }
        }
        let raw = Self { h: values.to_vec() };
        let widths = (0..m / 2).map(|i| values[i] + values[i + m / 2]);
        let (min_width, max_width) = widths.fold((f64::INFINITY, 0.0_f64), |(lo, hi), w| (lo.min(w), hi.max(w)));
        if !(min_width > 1e-9 * max_width) {
            return Err(GeometryError::DegenerateBody);
        }
        let positive = !recentre || raw.min_support() > 1e-12 * raw.max_support();
        if positive && raw.is_discretely_convex() {
            return Ok((raw, 0.0));
        }

        let points: Vec<Point> = (0..m).map(|i| raw.boundary_point_at(i)).collect();
        let mut poly = hull::monotone_chain(&points);
        let scale = raw.h.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if poly.len() < 3 || hull::polygon_area(&poly) <= 1e-12 * scale * scale {
            return Err(GeometryError::DegenerateBody);
        }
        let mut body = Self::from_polygon_unchecked(&poly, m);
        if recentre && body.min_support() <= 1e-12 * body.max_support() {
            let s = body.steiner_point();
            for v in &mut poly {
                *v = *v - s;
            }
            body = Self::from_polygon_unchecked(&poly, m);
            if body.min_support() <= 0.0 {
                return Err(GeometryError::DegenerateBody);
            }
        }
        let correction = body.h.iter().zip(values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok((body, correction))
    }

    /// Support function of a convex polygon sampled on an `m`-point grid.
    pub fn from_polygon(vertices: &[Point], m: usize) -> Result<Self> {
        check_grid(m)?;
        let poly = hull::monotone_chain(vertices);
        if poly.len() < 3 {
            return Err(GeometryError::DegenerateBody);
        }
        Self::from_support(&Self::from_polygon_unchecked(&poly, m).h)
    }

    // Sampled polygon support functions are exactly discretely convex:
    // each vertex contributes |v|cos(θ-φ), whose discrete curvature radius is
    // |v|cos(θ-φ)·(1 - (2 - 2cosΔθ)/Δθ²) ≥ 0 wherever it is the maximum.
    fn from_polygon_unchecked(poly: &[Point], m: usize) -> Self {
        let h = (0..m).map(|i| hull::polygon_support(poly, Point::polar(grid_angle(i, m)))).collect();
        Self { h }
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(m)?;
        let values: Vec<f64> = (0..m).map(|i| f(grid_angle(i, m))).collect();
        Self::from_support(&values)
    }

    pub fn disk(center: Point, radius: f64, m: usize) -> Result<Self> {
        Self::from_fn(m, |t| radius + center.dot(Point::polar(t)))
    }

    /// Ellipse with semi-axes `a` (along the rotated x axis) and `b`.
    pub fn ellipse(a: f64, b: f64, center: Point, rotation: f64, m: usize) -> Result<Self> {
        Self::from_fn(m, |t| {
            let (s, c) = (t - rotation).sin_cos();
            (a * a * c * c + b * b * s * s).sqrt() + center.dot(Point::polar(t))
        })
    }

    pub fn grid_size(&self) -> usize {
        self.h.len()
    }

    pub fn delta_theta(&self) -> f64 {
        TAU / self.h.len() as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        grid_angle(i, self.h.len())
    }

    pub fn support(&self) -> &[f64] {
        &self.h
    }

    pub fn support_at(&self, i: usize) -> f64 {
        self.h[i % self.h.len()]
    }

    pub fn max_support(&self) -> f64 {
        self.h.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_support(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn neighbours(&self, i: usize) -> (f64, f64, f64) {
        let m = self.h.len();
        (self.h[(i + m - 1) % m], self.h[i], self.h[(i + 1) % m])
    }

    /// Centered-difference derivative of the support function.
    pub fn support_derivative(&self, i: usize) -> f64 {
        let (prev, _, next) = self.neighbours(i);
        (next - prev) / (2.0 * self.delta_theta())
    }

    /// Boundary point with outer normal `θ_i`.
    pub fn boundary_point_at(&self, i: usize) -> Point {
        let i = i % self.h.len();
        let e = Point::polar(self.theta(i));
        self.h[i] * e + self.support_derivative(i) * e.perp()
    }

    /// Boundary point with outer normal `dir`, linearly interpolated between
    /// the neighbouring grid normals.
    pub fn boundary_point(&self, dir: Direction) -> Point {
        let pos = dir.angle() / self.delta_theta();
        let i0 = pos.floor() as usize;
        let w = pos - i0 as f64;
        let a = self.boundary_point_at(i0);
        if w == 0.0 {
            return a;
        }
        let b = self.boundary_point_at(i0 + 1);
        (1.0 - w) * a + w * b
    }

    /// Discrete radius of curvature `h'' + h` at normal `θ_i`.
    pub fn curvature_radius(&self, i: usize) -> f64 {
        let (prev, mid, next) = self.neighbours(i % self.h.len());
        let dt = self.delta_theta();
        (prev - 2.0 * mid + next) / (dt * dt) + mid
    }

    pub fn min_curvature_radius(&self) -> f64 {
        (0..self.h.len()).map(|i| self.curvature_radius(i)).fold(f64::INFINITY, f64::min)
    }

    pub fn convexity_tolerance(&self) -> f64 {
        CONVEXITY_RTOL * self.max_support().abs()
    }

    pub fn is_discretely_convex(&self) -> bool {
        self.min_curvature_radius() >= -self.convexity_tolerance()
    }

    /// `(1/π)∫ h(θ) e(θ) dθ`, computed with the rectangle rule (exact for
    /// translated disks on a uniform grid).
    pub fn steiner_point(&self) -> Point {
        let dt = self.delta_theta();
        let mut acc = Point::ORIGIN;
        for (i, &h) in self.h.iter().enumerate() {
            acc = acc + (h * dt / PI) * Point::polar(self.theta(i));
        }
        acc
    }

    /// Radius of the largest disk centred at the Steiner point whose support
    /// values stay below the body's.
    pub fn inradius(&self) -> f64 {
        let s = self.steiner_point();
        (0..self.h.len()).map(|i| self.h[i] - s.dot(Point::polar(self.theta(i)))).fold(f64::INFINITY, f64::min)
    }

    /// Largest distance from the Steiner point to a boundary point.
    pub fn circumradius(&self) -> f64 {
        let s = self.steiner_point();
        (0..self.h.len()).map(|i| (self.boundary_point_at(i) - s).norm()).fold(0.0, f64::max)
    }

    /// Maximal width, which equals the diameter for convex bodies.
    pub fn diameter(&self) -> f64 {
        let m = self.h.len();
        (0..m / 2).map(|i| self.h[i] + self.h[i + m / 2]).fold(0.0, f64::max)
    }

    /// Homothety about `center` with ratio `factor > 0`.
    pub fn scaled_about(&self, center: Point, factor: f64) -> Result<Self> {
        let values: Vec<f64> = (0..self.h.len())
            .map(|i| {
                let c = center.dot(Point::polar(self.theta(i)));
                c + factor * (self.h[i] - c)
            })
            .collect();
        Self::convexify_in_place(&values).map(|(body, _)| body)
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.h.len() != other.h.len() {
            return Err(GeometryError::GridMismatch(self.h.len(), other.h.len()));
        }
        Ok(())
    }

    /// `(1-λ)A + λB`.
    pub fn minkowski_combine(&self, other: &Self, lambda: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(GeometryError::InvalidWeight(lambda));
        }
        let h = self.h.iter().zip(&other.h).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect();
        Ok(Self { h })
    }

    /// Convex hull of `A ∪ B`.
    pub fn hull_of_union(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let h: Vec<f64> = self.h.iter().zip(&other.h).map(|(a, b)| a.max(*b)).collect();
        Self::convexify_in_place(&h).map(|(body, _)| body)
    }

    /// Hausdorff distance, i.e. the sup-norm of the support difference.
    pub fn hausdorff_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.h.iter().zip(&other.h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub k: u32,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintKind {
    Constant(f64),
    /// `a0 + Σ a_k cos kθ + b_k sin kθ`
    Fourier {
        a0: f64,
        terms: Vec<FourierTerm>,
    },
    /// Values on a uniform grid, periodic linear interpolation in between.
    Samples(Vec<f64>),
}

/// The gradient constraint `g` on the unit circle, with bounds `0 < c ≤ g ≤ C`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConstraint {
    kind: ConstraintKind,
    lower: f64,
    upper: f64,
}

impl BoundaryConstraint {
    pub fn constant(value: f64) -> Result<Self> {
        Self::with_kind(ConstraintKind::Constant(value), &[value])
    }

    /// Fourier series; bounds are taken over a grid 16 times finer than `m`.
    pub fn fourier(a0: f64, terms: Vec<FourierTerm>, m: usize) -> Result<Self> {
        check_grid(m)?;
        let kind = ConstraintKind::Fourier { a0, terms };
        let fine = 16 * m;
        let values: Vec<f64> = (0..fine).map(|i| eval_kind(&kind, grid_angle(i, fine))).collect();
        Self::with_kind(kind, &values)
    }

    pub fn samples(values: Vec<f64>) -> Result<Self> {
        check_grid(values.len())?;
        let copy = values.clone();
        Self::with_kind(ConstraintKind::Samples(values), &copy)
    }

    fn with_kind(kind: ConstraintKind, values: &[f64]) -> Result<Self> {
        let lower = values.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(lower > 0.0) || !upper.is_finite() {
            return Err(GeometryError::NonPositiveConstraint(lower));
        }
        Ok(Self { kind, lower, upper })
    }

    pub fn kind(&self) -> &ConstraintKind {
        &self.kind
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn eval(&self, dir: Direction) -> f64 {
        eval_kind(&self.kind, dir.angle())
    }

    /// Values at the normals of an `m`-point grid.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        (0..m).map(|i| self.eval(Direction::grid(i, m))).collect()
    }

    /// The constraint whose reciprocal is the weighted mean of the
    /// reciprocals, `1/g_λ = (1-λ)/g_0 + λ/g_1`, as samples on `m` normals.
    pub fn harmonic_mean(g0: &Self, g1: &Self, lambda: f64, m: usize) -> Result<Self> {
        check_grid(m)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(GeometryError::InvalidWeight(lambda));
        }
        let a = g0.sample(m);
        let b = g1.sample(m);
        let values = if lambda == 0.0 {
            a
        } else if lambda == 1.0 {
            b
        } else {
            a.iter().zip(&b).map(|(x, y)| 1.0 / ((1.0 - lambda) / x + lambda / y)).collect()
        };
        Self::samples(values)
    }
}

fn eval_kind(kind: &ConstraintKind, theta: f64) -> f64 {
    match kind {
        ConstraintKind::Constant(v) => *v,
        ConstraintKind::Fourier { a0, terms } => terms.iter().fold(*a0, |acc, t| {
            let (s, c) = (t.k as f64 * theta).sin_cos();
            acc + t.a * c + t.b * s
        }),
        ConstraintKind::Samples(values) => {
            let m = values.len();
            let mut pos = theta.rem_euclid(TAU) * m as f64 / TAU;
            if (pos - pos.round()).abs() < 1e-9 {
                pos = pos.round();
            }
            let i0 = (pos.floor() as usize) % m;
            let w = pos - pos.floor();
            (1.0 - w) * values[i0] + w * values[(i0 + 1) % m]
        }
    }
}
