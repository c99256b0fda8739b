//! Reference computations used by the integration tests. None of these call
//! into the crate's own numerics.

#![allow(dead_code)]

use bernoulli_core::{GridFunction, Point};

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) <= 0.0, "no sign change on [{a}, {b}]");
    while b - a > tol {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Minimiser of a unimodal `f` on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let k = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > tol {
        let c = b - k * (b - a);
        let d = a + k * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Gradient of the logarithmic annulus potential (p = 2, plane) on the inner
/// circle of radius `r`, outer radius `big_r`.
pub fn log_gradient(r: f64, big_r: f64) -> f64 {
    1.0 / (r * (big_r / r).ln())
}

/// Both radii with `log_gradient(r, R) = g`, small first.
pub fn log_roots(g: f64, big_r: f64) -> Option<(f64, f64)> {
    // r ln(R/r) = 1/g; the left side peaks at r = R/e with value R/e
    let target = 1.0 / g;
    let phi = |r: f64| r * (big_r / r).ln() - target;
    let peak = big_r / std::f64::consts::E;
    if phi(peak) < 0.0 {
        return None;
    }
    let tol = 1e-14 * big_r;
    Some((bisect(phi, 1e-12 * big_r, peak, tol), bisect(phi, peak, big_r * (1.0 - 1e-15), tol)))
}

/// Radial p-capacitary potential of the planar annulus `r_in < |x| < big_r`
/// at radius `s`, by shooting: `(r |u'|^{p-2} u')' = 0` is the linear ODE
/// `u'' = -u'/((p-1) r)`, integrated with RK4 from `r_in` and rescaled to
/// meet both boundary values.
pub fn shooting_potential(p: f64, r_in: f64, big_r: f64, s: f64, steps: usize) -> f64 {
    let rhs = |r: f64, v: f64| -v / ((p - 1.0) * r);
    let integrate = |to: f64| {
        let h = (to - r_in) / steps as f64;
        let (mut r, mut u, mut v) = (r_in, 0.0, 1.0);
        for _ in 0..steps {
            let (k1u, k1v) = (v, rhs(r, v));
            let (k2u, k2v) = (v + 0.5 * h * k1v, rhs(r + 0.5 * h, v + 0.5 * h * k1v));
            let (k3u, k3v) = (v + 0.5 * h * k2v, rhs(r + 0.5 * h, v + 0.5 * h * k2v));
            let (k4u, k4v) = (v + h * k3v, rhs(r + h, v + h * k3v));
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            r += h;
        }
        u
    };
    let w_end = integrate(big_r);
    (w_end - integrate(s)) / w_end
}

/// `h'' + h ≥ -tol` with centred differences, periodic.
pub fn discretely_convex(h: &[f64], tol: f64) -> bool {
    let m = h.len();
    let dt = std::f64::consts::TAU / m as f64;
    (0..m).all(|i| {
        let (a, b, c) = (h[(i + m - 1) % m], h[i], h[(i + 1) % m]);
        (a - 2.0 * b + c) / (dt * dt) + b >= -tol
    })
}

/// Gift-wrapping hull, counterclockwise, without collinear points.
pub fn jarvis_hull(points: &[Point]) -> Vec<Point> {
    let start = *points.iter().min_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))).unwrap();
    let mut hull = vec![start];
    let mut current = start;
    loop {
        let mut next = points[0];
        for &q in points {
            if next == current {
                next = q;
                continue;
            }
            let turn = (next - current).cross(q - current);
            let farther = (q - current).norm() > (next - current).norm();
            if turn < 0.0 || (turn == 0.0 && farther) {
                next = q;
            }
        }
        if next == start {
            break;
        }
        hull.push(next);
        current = next;
    }
    hull
}

fn in_closed_triangle(x: Point, a: Point, b: Point, c: Point, tol: f64) -> bool {
    let area = (b - a).cross(c - a);
    if area.abs() < 1e-14 {
        let on = |p: Point, q: Point| {
            let d = q - p;
            let len2 = d.dot(d);
            let t = if len2 == 0.0 { 0.0 } else { ((x - p).dot(d) / len2).clamp(0.0, 1.0) };
            (x - (p + t * d)).norm() <= tol
        };
        return on(a, b) || on(b, c) || on(a, c);
    }
    let l1 = (b - x).cross(c - x) / area;
    let l2 = (c - x).cross(a - x) / area;
    let l3 = 1.0 - l1 - l2;
    l1 >= -1e-12 && l2 >= -1e-12 && l3 >= -1e-12
}

/// `max min{f(x1), f(x2), f(x3)}` over all triples of strided nodes whose
/// triangle contains `x`. Nodes are visited in decreasing value so that the
/// search can stop early; otherwise the enumeration is exhaustive.
pub fn brute_maxmin(f: &GridFunction, x: Point, stride: usize) -> Option<f64> {
    let mut nodes = Vec::new();
    for iy in (0..f.ny()).step_by(stride) {
        for ix in (0..f.nx()).step_by(stride) {
            let v = f.value(ix, iy);
            if v.is_finite() {
                nodes.push((f.node(ix, iy), v));
            }
        }
    }
    nodes.sort_by(|a, b| b.1.total_cmp(&a.1));
    let tol = 1e-9 * f.spacing();
    // with i ≤ j ≤ k the triple's minimum is nodes[k].1
    for k in 0..nodes.len() {
        for i in 0..=k {
            for j in i..=k {
                if in_closed_triangle(x, nodes[i].0, nodes[j].0, nodes[k].0, tol) {
                    return Some(nodes[k].1);
                }
            }
        }
    }
    None
}

/// Runs a solve and reports the elapsed time.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, std::time::Duration) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed())
}
