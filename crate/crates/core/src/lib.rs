//! Numerical solver for the interior Bernoulli free boundary problem with a
//! p-Laplacian and a gradient constraint that depends on the outer normal.
//!
//! Given a convex domain `Ω ⊂ R²`, an exponent `p > 1` and a positive function
//! `g` on the unit circle, the solver looks for a convex `K ⊂ Ω` whose
//! p-capacitary potential `u` (p-harmonic in `Ω \ K`, `u = 0` on `∂Ω`,
//! `u = 1` on `∂K`) satisfies `|Du| = g(ν)` on `∂K`, `ν` the outer normal of `K`.
//!
//! Modules:
//! - [`geometry`]: convex bodies as sampled support functions, the constraint `g`.
//! - [`pde`]: mapped ring meshes and the p-capacitary potential solver.
//! - [`oracles`]: closed-form radial solutions and ball Bernoulli constants.
//! - [`freeboundary`]: the trial free boundary iteration and subsolution checks.
//! - [`envelope`]: quasi-concave envelopes and Minkowski combination of potentials.
//! - [`config`], [`io`], [`experiments`]: problem files, CSV/JSON output and the
//!   multi-solve experiments driven by the command line tool.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod envelope;
pub mod experiments;
pub mod freeboundary;
pub mod geometry;
pub mod hull;
pub mod io;
pub mod oracles;
pub mod pde;

pub use config::ProblemConfig;
pub use envelope::{GridFunction, WeightVector};
pub use freeboundary::{solve_interior_bernoulli, SolveReport, SolveStatus, SolverConfig};
pub use geometry::{BoundaryConstraint, ConvexBody, Direction, FourierTerm};
pub use hull::Point;
pub use pde::{PotentialField, RingMesh};
