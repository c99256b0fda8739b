mod common;

use bernoulli_core::freeboundary::{bernoulli_constant_numeric, check_subsolution};
use bernoulli_core::{solve_interior_bernoulli, BoundaryConstraint, ConvexBody, Point, SolveStatus, SolverConfig};
use common::*;

fn grid() -> SolverConfig {
    SolverConfig { angular_nodes: 64, radial_layers: 33, ..SolverConfig::default() }
}

fn constant(g: f64) -> BoundaryConstraint {
    BoundaryConstraint::constant(g).unwrap()
}

#[test]
fn disk_solution_is_a_centred_circle() {
    let config = grid();
    let omega = ConvexBody::disk(Point::new(0.0, 0.0), 1.0, 64).unwrap();
    let report = solve_interior_bernoulli(&omega, &constant(4.0), 2.0, &config).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    let h = report.body.support();
    let mean = h.iter().sum::<f64>() / h.len() as f64;
    let spread = h.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    assert!(spread <= 1e-3 * mean, "{spread}");
    let (_, large) = log_roots(4.0, 1.0).unwrap();
    assert!((mean - large).abs() < 2.0 * report.mesh.mesh_tolerance(), "{mean} vs {large}");
}

#[test]
fn off_centre_disk_translates_the_solution() {
    let config = grid();
    let c = Point::new(0.3, -0.2);
    let omega = ConvexBody::disk(c, 1.0, 64).unwrap();
    let report = solve_interior_bernoulli(&omega, &constant(3.0), 2.0, &config).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    let (_, large) = log_roots(3.0, 1.0).unwrap();
    let dev = (0..64).map(|i| (report.body.support_at(i) - c.dot(Point::polar(report.body.theta(i))) - large).abs()).fold(0.0, f64::max);
    assert!(dev < 2.0 * report.mesh.mesh_tolerance(), "{dev}");
}

#[test]
fn quarter_turn_rotates_the_solution() {
    let config = grid();
    let ellipse = |rotation| ConvexBody::ellipse(1.2, 0.8, Point::new(0.0, 0.0), rotation, 64).unwrap();
    let a = solve_interior_bernoulli(&ellipse(0.0), &constant(4.0), 2.0, &config).unwrap();
    let b = solve_interior_bernoulli(&ellipse(std::f64::consts::FRAC_PI_2), &constant(4.0), 2.0, &config).unwrap();
    assert_eq!(a.status, SolveStatus::Converged);
    assert_eq!(b.status, SolveStatus::Converged);
    let tol = 2.0 * a.mesh.mesh_tolerance().max(b.mesh.mesh_tolerance());
    // a quarter turn is a shift by 16 of 64 grid directions
    let dev = (0..64).map(|i| (b.body.support_at((i + 16) % 64) - a.body.support_at(i)).abs()).fold(0.0, f64::max);
    assert!(dev <= tol, "{dev} > {tol}");
}

#[test]
fn larger_constraint_gives_a_larger_set() {
    let config = grid();
    let omega = ConvexBody::ellipse(1.2, 0.9, Point::new(0.0, 0.0), 0.3, 64).unwrap();
    let low = solve_interior_bernoulli(&omega, &constant(4.0), 2.0, &config).unwrap();
    let high = solve_interior_bernoulli(&omega, &constant(5.0), 2.0, &config).unwrap();
    assert_eq!(low.status, SolveStatus::Converged);
    assert_eq!(high.status, SolveStatus::Converged);
    let tol = 2.0 * low.mesh.mesh_tolerance().max(high.mesh.mesh_tolerance());
    for i in 0..64 {
        assert!(high.body.support_at(i) >= low.body.support_at(i) - tol, "{i}");
    }
}

#[test]
fn converged_solution_is_a_subsolution() {
    let config = grid();
    let omega = ConvexBody::ellipse(1.1, 0.9, Point::new(0.0, 0.0), 0.0, 64).unwrap();
    let g = constant(4.0);
    let report = solve_interior_bernoulli(&omega, &g, 2.0, &config).unwrap();
    assert_eq!(report.status, SolveStatus::Converged);
    let check = check_subsolution(&omega, &report.body, &g, 2.0, 10.0 * config.tol_residual, &config).unwrap();
    assert!(check.pass, "{}", check.worst_margin);
    let max_h = report.body.max_support();
    assert!(discretely_convex(report.body.support(), 1e-9 * max_h));
}

#[test]
fn repeated_solves_are_identical() {
    let config = grid();
    let omega = ConvexBody::ellipse(1.3, 0.8, Point::new(0.1, 0.0), 0.4, 64).unwrap();
    let a = solve_interior_bernoulli(&omega, &constant(4.0), 3.0, &config).unwrap();
    let b = solve_interior_bernoulli(&omega, &constant(4.0), 3.0, &config).unwrap();
    assert_eq!(a.body.support(), b.body.support());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn no_solution_below_the_ball_constant() {
    let config = grid();
    let omega = ConvexBody::disk(Point::new(0.0, 0.0), 1.0, 64).unwrap();
    for g in [1.5, 2.4] {
        let report = solve_interior_bernoulli(&omega, &constant(g), 2.0, &config).unwrap();
        assert_eq!(report.status, SolveStatus::NoSolution, "g = {g}");
    }
}

#[test]
fn ellipse_constant_lies_between_inscribed_and_circumscribed_disks() {
    // Λ(B_ρ) = e/ρ for the disk; B_b ⊂ E ⊂ B_a
    let config = grid();
    let (a, b) = (1.5, 1.0);
    let omega = ConvexBody::ellipse(a, b, Point::new(0.0, 0.0), 0.0, 64).unwrap();
    let found = bernoulli_constant_numeric(&omega, 2.0, &config).unwrap();
    let e = std::f64::consts::E;
    assert!(found.lambda >= e / a * 0.98 && found.lambda <= e / b * 1.02, "{}", found.lambda);
}
