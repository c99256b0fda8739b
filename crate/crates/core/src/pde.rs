//! p-capacitary potentials of convex rings on a mapped mesh.
//!
//! The ring `Ω \ K` is parametrised by `(s, θ) ∈ [0, 1] × [0, 2π)`:
//!
//! ```text
//! x(s, θ_i) = (1 - s)·q_i + s·Q_i
//! ```
//!
//! where `q_i` is the boundary point of `K` with outer normal `θ_i` and `Q_i`
//! is where the ray from `q_i` along that normal leaves `Ω`. In these
//! coordinates the equation `div(a(|Du|) Du) = 0` becomes
//!
//! ```text
//! ∂_s(a·(c_ss u_s + c_sθ u_θ)) + ∂_θ(a·(c_sθ u_s + c_θθ u_θ)) = 0
//! c_ss = |x_θ|²/J,  c_sθ = -(x_s·x_θ)/J,  c_θθ = |x_s|²/J,  J = x_s × x_θ
//! ```
//!
//! discretised in conservative form with fluxes on cell faces (a nine-point
//! stencil once the cross terms are included). The nonlinearity
//! `a = (|Du|² + ε²)^{(p-2)/2}` is handled by freezing `a` (Picard), each
//! frozen problem being solved by lexicographic SOR.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::geometry::{ConvexBody, GeometryError};
use crate::hull::Point;

pub const DEFAULT_RADIAL_LAYERS: usize = 65;
pub const MIN_RADIAL_LAYERS: usize = 16;

/// Contact threshold as a fraction of the outer domain's diameter.
pub const GAP_MIN_FRACTION: f64 = 1e-3;

/// Default SOR relaxation factor.
pub const DEFAULT_SOR_FACTOR: f64 = 1.7;

/// Rays meeting the outer boundary more obliquely than this (cosine between
/// the ray and the face normal) use the normal-to-normal segment instead.
const GRAZING_COS: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("inner body is within {gap:.3e} of the outer boundary (minimum {min:.3e})")]
    BoundaryContact { gap: f64, min: f64 },
    #[error("mesh map folds near node ({i}, {j})")]
    MeshFold { i: usize, j: usize },
    #[error("need at least {MIN_RADIAL_LAYERS} radial layers, got {0}")]
    TooFewLayers(usize),
    #[error("exponent p = {0} must exceed 1")]
    InvalidExponent(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("field has {got} values, mesh has {expected} nodes")]
    SizeMismatch { expected: usize, got: usize },
    #[error("Picard iteration did not converge within the iteration cap")]
    NoConvergence(Box<PotentialField>),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Metric {
    jac: f64,
    c_ss: f64,
    c_st: f64,
    c_tt: f64,
}

impl Metric {
    fn new(x_s: Point, x_t: Point) -> Self {
        let jac = x_s.cross(x_t);
        Self { jac, c_ss: x_t.dot(x_t) / jac, c_st: -x_s.dot(x_t) / jac, c_tt: x_s.dot(x_s) / jac }
    }

    fn grad_sq(&self, u_s: f64, u_t: f64) -> f64 {
        (self.c_ss * u_s * u_s + 2.0 * self.c_st * u_s * u_t + self.c_tt * u_t * u_t) / self.jac
    }
}

/// Curvilinear discretisation of a convex ring.
#[derive(Clone, Debug)]
pub struct RingMesh {
    m: usize,
    l: usize,
    inner: Vec<Point>,
    outer: Vec<Point>,
    nodes: Vec<Point>,
    node_metric: Vec<Metric>,
    // (i, j + 1/2), j < l - 1
    s_faces: Vec<Metric>,
    // (i + 1/2, j)
    t_faces: Vec<Metric>,
    gap_min: f64,
    fallback_rays: usize,
}

impl RingMesh {
    pub fn angular_nodes(&self) -> usize {
        self.m
    }

    pub fn radial_layers(&self) -> usize {
        self.l
    }

    pub fn delta_theta(&self) -> f64 {
        TAU / self.m as f64
    }

    pub fn delta_s(&self) -> f64 {
        1.0 / (self.l - 1) as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.m as f64
    }

    pub fn s(&self, j: usize) -> f64 {
        j as f64 * self.delta_s()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.m + i
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        self.nodes[self.index(i, j)]
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn inner_points(&self) -> &[Point] {
        &self.inner
    }

    pub fn outer_points(&self) -> &[Point] {
        &self.outer
    }

    /// Ray length from `∂K` to `∂Ω` at every angular node.
    pub fn gaps(&self) -> Vec<f64> {
        self.inner.iter().zip(&self.outer).map(|(q, big_q)| (*big_q - *q).norm()).collect()
    }

    pub fn gap_min(&self) -> f64 {
        self.gap_min
    }

    /// Number of nodes whose ray was replaced by the normal-to-normal segment.
    pub fn fallback_rays(&self) -> usize {
        self.fallback_rays
    }

    /// Largest radial cell size, the resolution scale of the mesh.
    pub fn mesh_tolerance(&self) -> f64 {
        self.gaps().into_iter().fold(0.0, f64::max) * self.delta_s()
    }

    /// Smallest cell Jacobian over nodes and faces.
    pub fn min_jacobian(&self) -> f64 {
        self.node_metric.iter().chain(&self.s_faces).chain(&self.t_faces).map(|mt| mt.jac).fold(f64::INFINITY, f64::min)
    }

    fn prev(&self, i: usize) -> usize {
        (i + self.m - 1) % self.m
    }

    fn next(&self, i: usize) -> usize {
        (i + 1) % self.m
    }
}

// Distance along `dir` from `from` to the boundary of the circumscribed
// polygon {x : <x, e_k> ≤ h_k}, with the index of the face hit.
fn ray_exit(omega: &ConvexBody, from: Point, dir: Point) -> Option<(f64, usize)> {
    let m = omega.grid_size();
    let mut best: Option<(f64, usize)> = None;
    for k in 0..m {
        let e = Point::polar(omega.theta(k));
        let c = dir.dot(e);
        if c <= 1e-12 {
            continue;
        }
        let t = (omega.support_at(k) - from.dot(e)) / c;
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, k));
        }
    }
    best
}

/// Builds the mapped mesh of `Ω \ K` with `layers` radial node rows.
pub fn build_mesh(omega: &ConvexBody, body: &ConvexBody, layers: usize) -> Result<RingMesh, PdeError> {
    let m = omega.grid_size();
    if body.grid_size() != m {
        return Err(GeometryError::GridMismatch(m, body.grid_size()).into());
    }
    if layers < MIN_RADIAL_LAYERS {
        return Err(PdeError::TooFewLayers(layers));
    }
    let gap_min = GAP_MIN_FRACTION * omega.diameter();
    let support_gap = (0..m).map(|i| omega.support_at(i) - body.support_at(i)).fold(f64::INFINITY, f64::min);
    if support_gap < gap_min {
        return Err(PdeError::BoundaryContact { gap: support_gap, min: gap_min });
    }

    let mut inner = Vec::with_capacity(m);
    let mut outer = Vec::with_capacity(m);
    let mut fallback_rays = 0;
    for i in 0..m {
        let q = body.boundary_point_at(i);
        let e = Point::polar(omega.theta(i));
        let big_q = match ray_exit(omega, q, e) {
            Some((t, k)) if e.dot(Point::polar(omega.theta(k))) >= GRAZING_COS => q + t * e,
            _ => {
                fallback_rays += 1;
                omega.boundary_point_at(i)
            }
        };
        let gap = (big_q - q).norm();
        if gap < gap_min || !gap.is_finite() {
            return Err(PdeError::BoundaryContact { gap, min: gap_min });
        }
        inner.push(q);
        outer.push(big_q);
    }

    let l = layers;
    let dt = TAU / m as f64;
    let ds = 1.0 / (l - 1) as f64;
    let d: Vec<Point> = (0..m).map(|i| outer[i] - inner[i]).collect();
    let diff = |pts: &[Point], i: usize| (1.0 / (2.0 * dt)) * (pts[(i + 1) % m] - pts[(i + m - 1) % m]);
    let dq: Vec<Point> = (0..m).map(|i| diff(&inner, i)).collect();
    let d_big_q: Vec<Point> = (0..m).map(|i| diff(&outer, i)).collect();

    let mut nodes = Vec::with_capacity(m * l);
    for j in 0..l {
        let s = j as f64 * ds;
        for i in 0..m {
            nodes.push((1.0 - s) * inner[i] + s * outer[i]);
        }
    }

    let fold = |jac: f64, i: usize, j: usize| -> Result<(), PdeError> {
        if jac > 0.0 && jac.is_finite() {
            Ok(())
        } else {
            Err(PdeError::MeshFold { i, j })
        }
    };

    let mut node_metric = Vec::with_capacity(m * l);
    for j in 0..l {
        let s = j as f64 * ds;
        for i in 0..m {
            let mt = Metric::new(d[i], (1.0 - s) * dq[i] + s * d_big_q[i]);
            fold(mt.jac, i, j)?;
            node_metric.push(mt);
        }
    }
    let mut s_faces = Vec::with_capacity(m * (l - 1));
    for j in 0..l - 1 {
        let s = (j as f64 + 0.5) * ds;
        for i in 0..m {
            let mt = Metric::new(d[i], (1.0 - s) * dq[i] + s * d_big_q[i]);
            fold(mt.jac, i, j)?;
            s_faces.push(mt);
        }
    }
    let mut t_faces = Vec::with_capacity(m * l);
    for j in 0..l {
        for i in 0..m {
            let ip = (i + 1) % m;
            let x_s = 0.5 * (d[i] + d[ip]);
            let x_t = (1.0 / dt) * (nodes[j * m + ip] - nodes[j * m + i]);
            let mt = Metric::new(x_s, x_t);
            fold(mt.jac, i, j)?;
            t_faces.push(mt);
        }
    }

    Ok(RingMesh { m, l, inner, outer, nodes, node_metric, s_faces, t_faces, gap_min, fallback_rays })
}

/// One Picard step of the nonlinear solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardStep {
    pub outer_iter: usize,
    pub update_norm: f64,
    pub linear_iters: usize,
}

/// Nodal values of a potential on a [`RingMesh`].
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    m: usize,
    l: usize,
    p: f64,
    eps_reg: f64,
    values: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
    log: Vec<PicardStep>,
}

impl PotentialField {
    /// Wraps arbitrary nodal values (indexed `j·M + i`) as a field on `mesh`.
    pub fn from_values(mesh: &RingMesh, p: f64, values: Vec<f64>) -> Result<Self, PdeError> {
        if values.len() != mesh.m * mesh.l {
            return Err(PdeError::SizeMismatch { expected: mesh.m * mesh.l, got: values.len() });
        }
        if !(p > 1.0) {
            return Err(PdeError::InvalidExponent(p));
        }
        Ok(Self {
            m: mesh.m,
            l: mesh.l,
            p,
            eps_reg: regularisation(mesh),
            values,
            iterations: 0,
            residual: f64::NAN,
            converged: false,
            log: Vec::new(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.m + i]
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eps_reg(&self) -> f64 {
        self.eps_reg
    }

    /// Picard iterations used.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Largest diagonal-scaled residual of the last frozen-coefficient system.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn picard_log(&self) -> &[PicardStep] {
        &self.log
    }

    /// Largest excursion of the values outside `[0, 1]`.
    pub fn max_principle_violation(&self) -> f64 {
        self.values.iter().map(|&u| (-u).max(u - 1.0).max(0.0)).fold(0.0, f64::max)
    }
}

fn regularisation(mesh: &RingMesh) -> f64 {
    let gaps = mesh.gaps();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    1e-8 / mean
}

/// Settings of the nonlinear solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeOptions {
    /// Stop when the sup-norm change between Picard iterates is below this.
    pub tol: f64,
    pub max_picard: usize,
    pub sor_factor: f64,
    /// Cap on SOR sweeps per Picard step.
    pub max_sweeps: usize,
    /// Dirichlet value on the inner boundary.
    pub inner_value: f64,
}

impl Default for PdeOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_picard: 100, sor_factor: DEFAULT_SOR_FACTOR, max_sweeps: 200_000, inner_value: 1.0 }
    }
}

/// The p-capacitary potential of the ring described by `mesh`.
pub fn solve_p_capacitary(mesh: &RingMesh, p: f64, tol: f64, max_iter: usize) -> Result<PotentialField, PdeError> {
    let opts = PdeOptions { tol, max_picard: max_iter, ..PdeOptions::default() };
    solve_with(mesh, p, &opts, None)
}

// Face coefficients a(|Du|) from the current iterate.
fn face_coefficients(mesh: &RingMesh, u: &[f64], p: f64, eps: f64, a_s: &mut [f64], a_t: &mut [f64]) {
    let (m, l) = (mesh.m, mesh.l);
    let (ds, dt) = (mesh.delta_s(), mesh.delta_theta());
    let expo = 0.5 * (p - 2.0);
    let eps2 = eps * eps;
    for j in 0..l - 1 {
        for i in 0..m {
            let (im, ip) = (mesh.prev(i), mesh.next(i));
            let u_s = (u[(j + 1) * m + i] - u[j * m + i]) / ds;
            let u_t = (u[j * m + ip] + u[(j + 1) * m + ip] - u[j * m + im] - u[(j + 1) * m + im]) / (4.0 * dt);
            let g2 = mesh.s_faces[j * m + i].grad_sq(u_s, u_t).max(0.0);
            a_s[j * m + i] = (g2 + eps2).powf(expo);
        }
    }
    for j in 1..l - 1 {
        for i in 0..m {
            let ip = mesh.next(i);
            let u_t = (u[j * m + ip] - u[j * m + i]) / dt;
            let u_s = (u[(j + 1) * m + i] + u[(j + 1) * m + ip] - u[(j - 1) * m + i] - u[(j - 1) * m + ip]) / (4.0 * ds);
            let g2 = mesh.t_faces[j * m + i].grad_sq(u_s, u_t).max(0.0);
            a_t[j * m + i] = (g2 + eps2).powf(expo);
        }
    }
}

// Nine-point stencil per interior node, offsets ordered (dj, di) row-major
// from (-1, -1) to (1, 1); the centre slot holds the (positive) diagonal.
fn assemble(mesh: &RingMesh, a_s: &[f64], a_t: &[f64]) -> Vec<[f64; 9]> {
    let (m, l) = (mesh.m, mesh.l);
    let (ds, dt) = (mesh.delta_s(), mesh.delta_theta());
    let mut stencil = vec![[0.0; 9]; m * l];
    for j in 1..l - 1 {
        for i in 0..m {
            let im = mesh.prev(i);
            let up = j * m + i;
            let down = (j - 1) * m + i;
            let right = j * m + i;
            let left = j * m + im;
            let (fu, fd) = (&mesh.s_faces[up], &mesh.s_faces[down]);
            let (fr, fl) = (&mesh.t_faces[right], &mesh.t_faces[left]);
            let a_up = a_s[up] * fu.c_ss / (ds * ds);
            let b_up = a_s[up] * fu.c_st / (4.0 * ds * dt);
            let a_dn = a_s[down] * fd.c_ss / (ds * ds);
            let b_dn = a_s[down] * fd.c_st / (4.0 * ds * dt);
            let a_rt = a_t[right] * fr.c_tt / (dt * dt);
            let b_rt = a_t[right] * fr.c_st / (4.0 * ds * dt);
            let a_lt = a_t[left] * fl.c_tt / (dt * dt);
            let b_lt = a_t[left] * fl.c_st / (4.0 * ds * dt);
            stencil[j * m + i] = [
                b_dn + b_lt,         // (-1, -1)
                a_dn - b_rt + b_lt,  // (-1,  0)
                -b_dn - b_rt,        // (-1, +1)
                -b_up + b_dn + a_lt, // ( 0, -1)
                a_up + a_dn + a_rt + a_lt,
                b_up - b_dn + a_rt, // ( 0, +1)
                -b_up - b_lt,       // (+1, -1)
                a_up + b_rt - b_lt, // (+1,  0)
                b_up + b_rt,        // (+1, +1)
            ];
        }
    }
    stencil
}

#[inline]
fn neighbour_sum(st: &[f64; 9], u: &[f64], m: usize, i: usize, im: usize, ip: usize, j: usize) -> f64 {
    let (lo, mid, hi) = ((j - 1) * m, j * m, (j + 1) * m);
    st[0] * u[lo + im]
        + st[1] * u[lo + i]
        + st[2] * u[lo + ip]
        + st[3] * u[mid + im]
        + st[5] * u[mid + ip]
        + st[6] * u[hi + im]
        + st[7] * u[hi + i]
        + st[8] * u[hi + ip]
}

fn sor(mesh: &RingMesh, stencil: &[[f64; 9]], u: &mut [f64], omega: f64, tol: f64, max_sweeps: usize) -> usize {
    let (m, l) = (mesh.m, mesh.l);
    for sweep in 1..=max_sweeps {
        let mut change: f64 = 0.0;
        for j in 1..l - 1 {
            for i in 0..m {
                let (im, ip) = (mesh.prev(i), mesh.next(i));
                let st = &stencil[j * m + i];
                let target = neighbour_sum(st, u, m, i, im, ip, j) / st[4];
                let k = j * m + i;
                let delta = omega * (target - u[k]);
                u[k] += delta;
                change = change.max(delta.abs());
            }
        }
        if change < tol {
            return sweep;
        }
    }
    max_sweeps
}

fn scaled_residuals(mesh: &RingMesh, stencil: &[[f64; 9]], u: &[f64]) -> Vec<(usize, usize, f64)> {
    let (m, l) = (mesh.m, mesh.l);
    let mut out = Vec::with_capacity(m * (l - 2));
    for j in 1..l - 1 {
        for i in 0..m {
            let (im, ip) = (mesh.prev(i), mesh.next(i));
            let st = &stencil[j * m + i];
            let r = (neighbour_sum(st, u, m, i, im, ip, j) - st[4] * u[j * m + i]) / st[4];
            out.push((i, j, r));
        }
    }
    out
}

/// Nonlinear solve with explicit options and an optional starting iterate
/// (indexed `j·M + i`; boundary rows are overwritten).
pub fn solve_with(mesh: &RingMesh, p: f64, opts: &PdeOptions, initial: Option<&[f64]>) -> Result<PotentialField, PdeError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(PdeError::InvalidExponent(p));
    }
    if !(opts.tol > 0.0) {
        return Err(PdeError::InvalidTolerance(opts.tol));
    }
    let (m, l) = (mesh.m, mesh.l);
    let n = m * l;
    let top = opts.inner_value;
    let mut u: Vec<f64> = match initial {
        Some(v) if v.len() == n => v.to_vec(),
        Some(v) => return Err(PdeError::SizeMismatch { expected: n, got: v.len() }),
        None => (0..n).map(|k| top * (1.0 - mesh.s(k / m))).collect(),
    };
    for i in 0..m {
        u[i] = top;
        u[(l - 1) * m + i] = 0.0;
    }

    let eps = regularisation(mesh);
    // Frozen coefficients are blended geometrically with weight 1/(p-1):
    // on radial profiles this removes the (2-p) feedback of plain Picard.
    let blend = (1.0 / (p - 1.0)).min(1.0);
    let mut a_s = vec![1.0; m * (l - 1)];
    let mut a_t = vec![1.0; n];
    let mut fresh_s = a_s.clone();
    let mut fresh_t = a_t.clone();
    let mut log = Vec::new();
    let mut converged = false;
    let mut stencil = Vec::new();

    for iter in 1..=opts.max_picard.max(1) {
        face_coefficients(mesh, &u, p, eps, &mut fresh_s, &mut fresh_t);
        if iter == 1 {
            a_s.copy_from_slice(&fresh_s);
            a_t.copy_from_slice(&fresh_t);
        } else {
            for (a, f) in a_s.iter_mut().zip(&fresh_s).chain(a_t.iter_mut().zip(&fresh_t)) {
                *a = a.powf(1.0 - blend) * f.powf(blend);
            }
        }
        stencil = assemble(mesh, &a_s, &a_t);
        let before = u.clone();
        let sweeps = sor(mesh, &stencil, &mut u, opts.sor_factor, 0.1 * opts.tol, opts.max_sweeps);
        let update = u.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / top.abs().max(1e-300);
        log.push(PicardStep { outer_iter: iter, update_norm: update, linear_iters: sweeps });
        if update < opts.tol {
            converged = true;
            break;
        }
    }

    let residual = scaled_residuals(mesh, &stencil, &u).iter().map(|r| r.2.abs()).fold(0.0, f64::max);
    let field = PotentialField { m, l, p, eps_reg: eps, values: u, iterations: log.len(), residual, converged, log };
    if converged {
        Ok(field)
    } else {
        Err(PdeError::NoConvergence(Box::new(field)))
    }
}

fn check_sizes(field: &PotentialField, mesh: &RingMesh) {
    assert!(field.m == mesh.m && field.l == mesh.l, "field is {}x{}, mesh is {}x{}", field.m, field.l, mesh.m, mesh.l);
}

/// `|Du|` at the inner boundary nodes.
pub fn boundary_gradient(field: &PotentialField, mesh: &RingMesh) -> Vec<f64> {
    check_sizes(field, mesh);
    let (ds, dt) = (mesh.delta_s(), mesh.delta_theta());
    let u = &field.values;
    let m = mesh.m;
    (0..m)
        .map(|i| {
            let u_s = (-3.0 * u[i] + 4.0 * u[m + i] - u[2 * m + i]) / (2.0 * ds);
            let u_t = (u[mesh.next(i)] - u[mesh.prev(i)]) / (2.0 * dt);
            mesh.node_metric[i].grad_sq(u_s, u_t).max(0.0).sqrt()
        })
        .collect()
}

/// Interior nodes where the discrete p-Laplacian is negative.
#[derive(Clone, Debug, PartialEq)]
pub struct SubharmonicReport {
    /// Smallest diagonal-scaled residual over interior nodes.
    pub min_residual: f64,
    /// `(i, j, residual)` for every node below `-tol`.
    pub violations: Vec<(usize, usize, f64)>,
}

impl SubharmonicReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates the regularised p-Laplacian of `field` with coefficients taken
/// from the field itself. Residuals are divided by the stencil diagonal, so
/// they are in units of `u`.
pub fn check_discrete_psubharmonic(field: &PotentialField, mesh: &RingMesh, tol: f64) -> SubharmonicReport {
    check_sizes(field, mesh);
    let mut a_s = vec![0.0; mesh.m * (mesh.l - 1)];
    let mut a_t = vec![0.0; mesh.m * mesh.l];
    face_coefficients(mesh, &field.values, field.p, field.eps_reg, &mut a_s, &mut a_t);
    let stencil = assemble(mesh, &a_s, &a_t);
    let residuals = scaled_residuals(mesh, &stencil, &field.values);
    let min_residual = residuals.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let violations = residuals.into_iter().filter(|r| r.2 < -tol).collect();
    SubharmonicReport { min_residual, violations }
}
