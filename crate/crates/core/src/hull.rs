//! Planar points and convex polygons.
//!
//! The hull is Andrew's monotone chain: sort lexicographically, then build the
//! lower and upper chains with a cross-product turn test. Collinear points on
//! hull edges are dropped, so the output is the minimal counterclockwise
//! vertex list. Degenerate inputs give a one- or two-vertex "polygon".

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `theta`.
    pub fn polar(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Self {
        Self { x: -self.y, y: self.x }
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, rhs: Point) -> Point {
        Point::new(self * rhs.x, self * rhs.y)
    }
}

fn turn(o: Point, a: Point, b: Point) -> f64 {
    (a - o).cross(b - o)
}

/// Convex hull of `points`, counterclockwise, starting from the
/// lexicographically smallest vertex.
pub fn monotone_chain(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.iter().copied().filter(|p| p.x.is_finite() && p.y.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // last point repeats the first
    hull.pop();
    hull
}

/// Signed area (positive for counterclockwise polygons).
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (k, &a) in poly.iter().enumerate() {
        let b = poly[(k + 1) % poly.len()];
        acc += a.cross(b);
    }
    0.5 * acc
}

/// Support function of a vertex list in direction `dir`.
pub fn polygon_support(poly: &[Point], dir: Point) -> f64 {
    poly.iter().map(|v| v.dot(dir)).fold(f64::NEG_INFINITY, f64::max)
}

/// Distance from `x` to segment `[a, b]`.
pub fn segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return (x - a).norm();
    }
    let t = ((x - a).dot(d) / len2).clamp(0.0, 1.0);
    (x - (a + t * d)).norm()
}

/// Membership test for a counterclockwise convex polygon (as produced by
/// [`monotone_chain`]), boundary included up to `tol`.
pub fn polygon_contains(poly: &[Point], x: Point, tol: f64) -> bool {
    match poly.len() {
        0 => false,
        1 => (x - poly[0]).norm() <= tol,
        2 => segment_distance(x, poly[0], poly[1]) <= tol,
        n => (0..n).all(|k| {
            let a = poly[k];
            let b = poly[(k + 1) % n];
            let edge = b - a;
            let len = edge.norm();
            len == 0.0 || edge.cross(x - a) / len >= -tol
        }),
    }
}

/// Closed x-interval where the horizontal line at height `y` meets the
/// polygon, widened by `tol`; `None` if the line misses it.
pub fn row_interval(poly: &[Point], y: f64, tol: f64) -> Option<(f64, f64)> {
    let n = poly.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut add = |x: f64| {
        lo = lo.min(x);
        hi = hi.max(x);
    };
    if n == 1 {
        if (poly[0].y - y).abs() <= tol {
            add(poly[0].x);
        }
    } else {
        let edges = if n == 2 { 1 } else { n };
        for k in 0..edges {
            let a = poly[k];
            let b = poly[(k + 1) % n];
            let (ymin, ymax) = (a.y.min(b.y), a.y.max(b.y));
            if y < ymin - tol || y > ymax + tol {
                continue;
            }
            if (b.y - a.y).abs() <= tol {
                add(a.x);
                add(b.x);
            } else {
                let t = ((y - a.y) / (b.y - a.y)).clamp(0.0, 1.0);
                add(a.x + t * (b.x - a.x));
            }
        }
    }
    (lo <= hi).then_some((lo - tol, hi + tol))
}

/// Outward unit normals of the polygon edges. Degenerate polygons (points and
/// segments) get the normals and directions of the segment plus the four axis
/// directions, so the list always describes the set as an intersection of
/// half planes up to tolerance.
pub fn polygon_normals(poly: &[Point]) -> Vec<Point> {
    let mut normals = vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(-1.0, 0.0), Point::new(0.0, -1.0)];
    match poly.len() {
        0 | 1 => {}
        2 => {
            let d = poly[1] - poly[0];
            let len = d.norm();
            if len > 0.0 {
                let u = (1.0 / len) * d;
                normals.extend([u, -1.0 * u, u.perp(), -1.0 * u.perp()]);
            }
        }
        n => {
            for k in 0..n {
                let e = poly[(k + 1) % n] - poly[k];
                let len = e.norm();
                if len > 0.0 {
                    // clockwise turn of a ccw edge points outward
                    normals.push(Point::new(e.y / len, -e.x / len));
                }
            }
        }
    }
    normals
}
