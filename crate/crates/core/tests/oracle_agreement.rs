mod common;

use bernoulli_core::envelope::{self, GridFunction};
use bernoulli_core::hull::{self, Point};
use bernoulli_core::oracles::{self, BernoulliRadii, RadialCase};
use bernoulli_core::{pde, ConvexBody};
use common::*;
use rand::{Rng, SeedableRng};

fn origin() -> Point {
    Point::new(0.0, 0.0)
}

#[test]
fn hull_matches_gift_wrapping() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let mut points = vec![Point::new(0.5, 0.0), Point::new(0.0, 0.5), Point::new(-0.5, 0.0), Point::new(0.0, -0.5)];
        points.extend((0..40).map(|_| Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        let reference = jarvis_hull(&points);
        let mut ours = hull::monotone_chain(&points);
        assert_eq!(ours.len(), reference.len());
        let start = ours.iter().position(|&p| p == reference[0]).unwrap();
        ours.rotate_left(start);
        assert_eq!(ours, reference);

        let body = ConvexBody::from_polygon(&points, 128).unwrap();
        for i in 0..128 {
            let e = Point::polar(body.theta(i));
            let h = reference.iter().map(|v| v.dot(e)).fold(f64::MIN, f64::max);
            assert!((body.support_at(i) - h).abs() < 1e-12);
        }
    }
}

#[test]
fn non_convex_support_is_replaced_by_its_hull() {
    // a four-lobed curve whose support samples are not convex
    let m = 128;
    let raw: Vec<f64> = (0..m).map(|i| 1.0 + 0.4 * (4.0 * std::f64::consts::TAU * i as f64 / m as f64).cos()).collect();
    assert!(!discretely_convex(&raw, 0.0));
    let (body, _) = ConvexBody::convexify(&raw).unwrap();
    let max_h = body.max_support();
    assert!(discretely_convex(body.support(), 1e-9 * max_h));
    // reference: gift-wrapping hull of the envelope points h e + h' e⊥
    let dt = std::f64::consts::TAU / m as f64;
    let points: Vec<Point> = (0..m)
        .map(|i| {
            let (e, d) = (Point::polar(i as f64 * dt), (raw[(i + 1) % m] - raw[(i + m - 1) % m]) / (2.0 * dt));
            raw[i] * e + d * e.perp()
        })
        .collect();
    let reference = jarvis_hull(&points);
    for i in 0..m {
        let e = Point::polar(i as f64 * dt);
        let h = reference.iter().map(|v| v.dot(e)).fold(f64::MIN, f64::max);
        assert!((body.support_at(i) - h).abs() < 1e-12, "{i}");
    }
}

#[test]
fn log_radii_match_independent_roots() {
    for (g, big_r) in [(3.0, 1.0), (5.0, 1.0), (3.0, 2.0), (1.0, 4.0), (10.0, 0.5)] {
        let (small, large) = log_roots(g, big_r).unwrap();
        match oracles::bernoulli_radii(2.0, 2, big_r, g).unwrap() {
            BernoulliRadii::Pair { small: s, large: l } => {
                assert!((s - small).abs() < 1e-9 * big_r, "{s} vs {small}");
                assert!((l - large).abs() < 1e-9 * big_r, "{l} vs {large}");
            }
            other => panic!("{other:?}"),
        }
    }
    assert!(log_roots(2.0, 1.0).is_none());
    assert_eq!(oracles::bernoulli_radii(2.0, 2, 1.0, 2.0).unwrap(), BernoulliRadii::Empty);
}

#[test]
fn closed_form_matches_shooting() {
    for p in [1.3, 2.0, 2.5, 4.0, 8.0] {
        for r in [0.1, 0.4, 0.8] {
            let case = RadialCase::new(p, 2, r, 1.0).unwrap();
            for k in 0..=8 {
                let s = r + (1.0 - r) * k as f64 / 8.0;
                let shot = shooting_potential(p, r, 1.0, s, 20_000);
                assert!((oracles::annulus_potential(&case, s).unwrap() - shot).abs() < 1e-8, "p {p} r {r} s {s}");
            }
        }
    }
}

fn annulus_error(p: f64, m: usize, l: usize) -> f64 {
    let mesh = pde::build_mesh(&ConvexBody::disk(origin(), 1.0, m).unwrap(), &ConvexBody::disk(origin(), 0.4, m).unwrap(), l).unwrap();
    let field = pde::solve_p_capacitary(&mesh, p, 1e-10, 300).unwrap();
    let case = RadialCase::new(p, 2, 0.4, 1.0).unwrap();
    mesh.nodes()
        .iter()
        .zip(field.values())
        .map(|(x, u)| (u - oracles::annulus_potential(&case, x.norm().clamp(0.4, 1.0)).unwrap()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn annulus_potential_converges_under_refinement() {
    for p in [1.5, 2.0, 3.0] {
        let coarse = annulus_error(p, 64, 17);
        let fine = annulus_error(p, 64, 33);
        assert!(fine < 2e-3, "p {p}: {fine}");
        assert!(fine <= coarse + 1e-9, "p {p}: {coarse} -> {fine}");
    }
}

#[test]
fn annulus_gradient_on_inner_circle() {
    let mesh = pde::build_mesh(&ConvexBody::disk(origin(), 1.0, 128).unwrap(), &ConvexBody::disk(origin(), 0.5, 128).unwrap(), 65).unwrap();
    let field = pde::solve_p_capacitary(&mesh, 2.0, 1e-10, 300).unwrap();
    let exact = log_gradient(0.5, 1.0);
    for d in pde::boundary_gradient(&field, &mesh) {
        assert!((d / exact - 1.0).abs() < 1e-2, "{d} vs {exact}");
    }
    assert!(pde::check_discrete_psubharmonic(&field, &mesh, 1e-6).passed());
}

#[test]
fn ring_sampling_reproduces_the_potential() {
    let mesh = pde::build_mesh(&ConvexBody::disk(origin(), 1.0, 128).unwrap(), &ConvexBody::disk(origin(), 0.5, 128).unwrap(), 33).unwrap();
    let field = pde::solve_p_capacitary(&mesh, 2.0, 1e-10, 300).unwrap();
    let grid = GridFunction::sample_ring_auto(&mesh, &field, 61).unwrap();
    let exact = |x: Point| (1.0 / x.norm()).ln().clamp(0.0, 2f64.ln()) / 2f64.ln();
    for iy in 0..grid.ny() {
        for ix in 0..grid.nx() {
            let x = grid.node(ix, iy);
            let e = if x.norm() > 1.0 { 0.0 } else { exact(x) };
            assert!((grid.value(ix, iy) - e).abs() < 1e-2, "{x:?}");
        }
    }
}

#[test]
fn envelope_agrees_with_exhaustive_maxmin() {
    // two separated bumps: the envelope fills the saddle between them
    let f = GridFunction::from_fn(Point::new(-1.2, -0.6), 0.1, 25, 13, |x| {
        let a = (1.0 - 1.5 * (x - Point::new(-0.6, 0.0)).norm()).max(0.0);
        let b = (0.7 - 1.2 * (x - Point::new(0.6, 0.0)).norm()).max(0.0);
        a.max(b)
    })
    .unwrap();
    let levels = 64;
    let env = envelope::quasiconcave_envelope(&f, levels).unwrap();
    let step = envelope::ladder_step(&f, levels);
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for _ in 0..20 {
        let (ix, iy) = (rng.random_range(0..25), rng.random_range(0..13));
        let oracle = brute_maxmin(&f, f.node(ix, iy), 1).unwrap();
        assert!((env.value(ix, iy) - oracle).abs() <= 2.0 * step, "({ix}, {iy})");
        let ours = envelope::maxmin_representation(&f, f.node(ix, iy), 1).unwrap();
        assert!((ours - oracle).abs() < 1e-12);
    }
    // the saddle point midway between the bumps is lifted
    assert!(env.value(12, 6) > f.value(12, 6) + 0.1);
}

#[test]
fn combination_of_annular_potentials() {
    // u_i = ln(R_i/|x|)/ln(R_i/r_i) between the circles; superlevel radii
    // are R_i (r_i/R_i)^t, so the combination at |x| = s solves
    // (ρ0(t) + ρ1(t))/2 = s
    let (r0, big0, r1, big1): (f64, f64, f64, f64) = (0.3, 1.0, 0.6, 2.0);
    let u = |r: f64, big: f64| move |x: Point| ((big / x.norm()).ln() / (big / r).ln()).clamp(0.0, 1.0);
    let rho = |t: f64| 0.5 * (big0 * (r0 / big0).powf(t) + big1 * (r1 / big1).powf(t));
    let exact = |s: f64| {
        if s <= rho(1.0) {
            1.0
        } else if s >= rho(0.0) {
            0.0
        } else {
            bisect(|t| rho(t) - s, 0.0, 1.0, 1e-12)
        }
    };
    let error = |n: usize| {
        let spacing = 4.4 / (n - 1) as f64;
        let o = Point::new(-2.2, -2.2);
        let f0 = GridFunction::from_fn(o, spacing, n, n, u(r0, big0)).unwrap();
        let f1 = GridFunction::from_fn(o, spacing, n, n, u(r1, big1)).unwrap();
        let combined = envelope::minkowski_combine_potentials(&f0, &f1, 0.5, 128).unwrap();
        let mut worst: f64 = 0.0;
        for iy in 0..n {
            for ix in 0..n {
                worst = worst.max((combined.value(ix, iy) - exact(combined.node(ix, iy).norm())).abs());
            }
        }
        worst
    };
    // the superlevel polygons are hulls of grid nodes, so the error is of
    // the order of the spacing times the slope
    let (coarse, fine) = (error(45), error(89));
    assert!(fine < 0.8 * coarse && fine < 5e-2, "{coarse} -> {fine}");
}
