//! Closed-form radial solutions.
//!
//! For concentric balls `B_r ⊂ B_R` in `R^N` the p-capacitary potential is
//! radial: with `β = (p - N)/(p - 1)`,
//!
//! ```text
//! u(s) = (s^β - R^β)/(r^β - R^β)        p ≠ N
//! u(s) = ln(R/s)/ln(R/r)                p = N
//! ```
//!
//! Both are evaluated through `expm1` so the `p → N` limit is continuous.
//! The boundary gradient `|u'(r)|` blows up as `r → 0` and `r → R`; its minimum
//! over `r` is the Bernoulli constant of the ball.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("radius {s} is outside [{r}, {big_r}]")]
    OutOfRange { s: f64, r: f64, big_r: f64 },
    #[error("invalid radial case: {0}")]
    InvalidCase(&'static str),
}

/// Relative tolerance of the golden-section search for the ball minimiser.
pub const GOLDEN_RTOL: f64 = 1e-10;

/// Concentric balls `B_r ⊂ B_R` in dimension `n` with exponent `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialCase {
    p: f64,
    n: u32,
    r: f64,
    big_r: f64,
}

impl RadialCase {
    pub fn new(p: f64, n: u32, r: f64, big_r: f64) -> Result<Self, OracleError> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(OracleError::InvalidCase("p must exceed 1"));
        }
        if n < 2 {
            return Err(OracleError::InvalidCase("dimension must be at least 2"));
        }
        if !(r > 0.0 && r < big_r && big_r.is_finite()) {
            return Err(OracleError::InvalidCase("radii must satisfy 0 < r < R"));
        }
        Ok(Self { p, n, r, big_r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn dimension(&self) -> u32 {
        self.n
    }
    pub fn inner(&self) -> f64 {
        self.r
    }
    pub fn outer(&self) -> f64 {
        self.big_r
    }

    /// `β = (p - N)/(p - 1)`.
    pub fn beta(&self) -> f64 {
        (self.p - self.n as f64) / (self.p - 1.0)
    }
}

// (x^β - 1)/β as a function of ln x, with the β → 0 limit ln x.
fn scaled_power_minus_one(beta: f64, log_x: f64) -> f64 {
    if beta == 0.0 {
        log_x
    } else {
        (beta * log_x).exp_m1() / beta
    }
}

/// Potential of the annulus at radius `s`.
pub fn annulus_potential(case: &RadialCase, s: f64) -> Result<f64, OracleError> {
    let (r, big_r) = (case.r, case.big_r);
    if !(s >= r && s <= big_r) {
        return Err(OracleError::OutOfRange { s, r, big_r });
    }
    let beta = case.beta();
    let num = scaled_power_minus_one(beta, (s / big_r).ln());
    let den = scaled_power_minus_one(beta, (r / big_r).ln());
    Ok((num / den).clamp(0.0, 1.0))
}

/// `|u'(r)|` on the inner sphere.
pub fn annulus_boundary_gradient(case: &RadialCase) -> f64 {
    let (r, big_r) = (case.r, case.big_r);
    // |β| r^{β-1}/|r^β - R^β| = 1/(r·|(R/r)^β - 1|/|β|)
    1.0 / (r * scaled_power_minus_one(case.beta(), (big_r / r).ln()).abs())
}

fn gradient_at(p: f64, n: u32, x: f64) -> f64 {
    // unit outer radius; callers rescale
    let case = RadialCase { p, n, r: x, big_r: 1.0 };
    annulus_boundary_gradient(&case)
}

/// Minimiser of the boundary gradient over inner radii of the unit ball.
fn unit_ball_minimiser(p: f64, n: u32) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-9, 1.0 - 1e-9);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (gradient_at(p, n, c), gradient_at(p, n, d));
    while (b - a) > GOLDEN_RTOL * (c.abs() + d.abs()) * 0.5 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gradient_at(p, n, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gradient_at(p, n, d);
        }
    }
    let x = 0.5 * (a + b);
    (x, gradient_at(p, n, x))
}

fn check_ball(p: f64, n: u32, big_r: f64) -> Result<(), OracleError> {
    RadialCase::new(p, n, 0.5 * big_r, big_r).map(|_| ())
}

/// Bernoulli constant `Λ_p(B_R)`: the smallest boundary gradient attainable
/// by a concentric inner ball.
pub fn bernoulli_constant_ball(p: f64, n: u32, big_r: f64) -> Result<f64, OracleError> {
    check_ball(p, n, big_r)?;
    Ok(unit_ball_minimiser(p, n).1 / big_r)
}

/// Inner radius that attains the ball's Bernoulli constant, and the constant.
pub fn ball_minimiser(p: f64, n: u32, big_r: f64) -> Result<(f64, f64), OracleError> {
    check_ball(p, n, big_r)?;
    let (x, g) = unit_ball_minimiser(p, n);
    Ok((x * big_r, g / big_r))
}

/// The ratio `R/r*` between outer radius and minimising inner radius, which
/// does not depend on `R`.
pub fn tangency_ratio(p: f64, n: u32) -> Result<f64, OracleError> {
    check_ball(p, n, 1.0)?;
    Ok(1.0 / unit_ball_minimiser(p, n).0)
}

/// Solutions `r` of `annulus_boundary_gradient(r) = τ` for the ball `B_R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BernoulliRadii {
    Empty,
    Tangent(f64),
    Pair { small: f64, large: f64 },
}

impl BernoulliRadii {
    /// The largest root, which carries the maximal solution.
    pub fn maximal(&self) -> Option<f64> {
        match *self {
            BernoulliRadii::Empty => None,
            BernoulliRadii::Tangent(r) => Some(r),
            BernoulliRadii::Pair { large, .. } => Some(large),
        }
    }

    pub fn roots(&self) -> Vec<f64> {
        match *self {
            BernoulliRadii::Empty => vec![],
            BernoulliRadii::Tangent(r) => vec![r],
            BernoulliRadii::Pair { small, large } => vec![small, large],
        }
    }
}

/// Relative width below which `τ` counts as the tangency value.
pub const TANGENCY_RTOL: f64 = 1e-9;

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn bernoulli_radii(p: f64, n: u32, big_r: f64, tau: f64) -> Result<BernoulliRadii, OracleError> {
    check_ball(p, n, big_r)?;
    if !(tau > 0.0) {
        return Err(OracleError::InvalidCase("tau must be positive"));
    }
    let (x_star, g_star) = unit_ball_minimiser(p, n);
    // work on the unit ball: gradients scale like 1/R
    let t = tau * big_r;
    if t < g_star * (1.0 - TANGENCY_RTOL) {
        return Ok(BernoulliRadii::Empty);
    }
    if t <= g_star * (1.0 + TANGENCY_RTOL) {
        return Ok(BernoulliRadii::Tangent(x_star * big_r));
    }
    let f = |x: f64| gradient_at(p, n, x) - t;
    let small = bisect(1e-6, x_star, f);
    let large = bisect(x_star, 1.0 - 1e-6, f);
    Ok(BernoulliRadii::Pair { small: small * big_r, large: large * big_r })
}
