use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use bernoulli_core::envelope::{self, GridFunction};
use bernoulli_core::{pde, solve_interior_bernoulli, BoundaryConstraint, ConvexBody, Point, SolverConfig};

fn disk(radius: f64, m: usize) -> ConvexBody {
    ConvexBody::disk(Point::new(0.0, 0.0), radius, m).unwrap()
}

fn mesh_and_pde(c: &mut Criterion) {
    let omega = ConvexBody::ellipse(1.3, 0.9, Point::new(0.0, 0.0), 0.2, 256).unwrap();
    let body = disk(0.5, 256);
    c.bench_function("build_mesh 256x65", |b| b.iter(|| pde::build_mesh(black_box(&omega), black_box(&body), 65).unwrap()));
    let mesh = pde::build_mesh(&omega, &body, 65).unwrap();
    let mut group = c.benchmark_group("p-capacitary 256x65");
    group.sample_size(10);
    for p in [2.0, 3.0] {
        group.bench_function(format!("p = {p}"), |b| b.iter(|| pde::solve_p_capacitary(&mesh, p, 1e-8, 100).unwrap()));
    }
    group.finish();
}

fn free_boundary(c: &mut Criterion) {
    let config = SolverConfig { angular_nodes: 64, radial_layers: 33, ..SolverConfig::default() };
    let omega = disk(1.0, 64);
    let g = BoundaryConstraint::constant(3.0).unwrap();
    let mut group = c.benchmark_group("free boundary");
    group.sample_size(10);
    group.bench_function("disk g = 3, 64x33", |b| b.iter(|| solve_interior_bernoulli(&omega, &g, 2.0, &config).unwrap()));
    group.finish();
}

fn envelope_bench(c: &mut Criterion) {
    let f = GridFunction::from_fn(Point::new(-1.5, -1.5), 0.03, 101, 101, |x| {
        let a = (1.0 - (x - Point::new(-0.5, 0.0)).norm()).max(0.0);
        let b = (0.8 - 1.3 * (x - Point::new(0.6, 0.2)).norm()).max(0.0);
        a.max(b)
    })
    .unwrap();
    c.bench_function("quasiconcave envelope 101x101, 64 levels", |b| {
        b.iter(|| envelope::quasiconcave_envelope(black_box(&f), 64).unwrap())
    });
}

criterion_group!(benches, mesh_and_pde, free_boundary, envelope_bench);
criterion_main!(benches);
