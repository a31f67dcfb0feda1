use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lab_core::fdsolver::{solve, BoundaryData, GridDomain, Shape, SolveOptions};
use lab_core::geometry::fit_supporting_plane;
use lab_core::grid::{Grid, GridFunction};
use lab_core::pucci::{discrete_pucci, pucci_sup, SymMat};
use lab_core::{dini_integral, Ellipticity, GraphDomain2D, Modulus, OpMode, Side, StencilSet};

fn pucci(c: &mut Criterion) {
    let e = Ellipticity::new(1.0, 2.0).unwrap();
    let m = SymMat::sym2(1.3, -0.4, -2.1);
    c.bench_function("pucci_sup_2x2", |b| b.iter(|| pucci_sup(black_box(&m), e)));

    let g = Grid::covering(0.05, -0.5, 0.5, -0.5, 0.5, 0).unwrap();
    let u = GridFunction::from_fn(g, |p| p[0] * p[0] - 0.3 * p[0] * p[1] + (2.0 * p[1]).sin());
    let centre = g.origin().unwrap();
    for w in [1, 3] {
        let s = StencilSet::new(w).unwrap();
        c.bench_function(&format!("discrete_pucci_width{w}"), |b| {
            b.iter(|| discrete_pucci(black_box(&u), centre, e, &s, OpMode::Sup).unwrap())
        });
    }
}

fn solver(c: &mut Criterion) {
    let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 32.0).unwrap();
    let e = Ellipticity::new(1.0, 2.0).unwrap();
    let opts = SolveOptions::default();
    let g = BoundaryData::zero_one();
    let mut group = c.benchmark_group("solve_half_disc_h32");
    group.sample_size(10);
    group.bench_function("laplace", |b| {
        b.iter(|| solve(&dom, OpMode::Laplace, Ellipticity::laplace(), None, &g, &opts).unwrap())
    });
    group.bench_function("sup_width3", |b| b.iter(|| solve(&dom, OpMode::Sup, e, None, &g, &opts).unwrap()));
    group.finish();
}

fn modulus(c: &mut Criterion) {
    let ils = Modulus::inv_log_sq();
    let pow = Modulus::power(0.5).unwrap();
    c.bench_function("dini_inv_log_sq", |b| b.iter(|| dini_integral(black_box(&ils), 0.5, 1e-9).unwrap()));
    c.bench_function("dini_power_half", |b| b.iter(|| dini_integral(black_box(&pow), 0.5, 1e-9).unwrap()));
}

fn geometry(c: &mut Criterion) {
    let dom = GraphDomain2D::log_example();
    let mut group = c.benchmark_group("plane_fit");
    group.sample_size(20);
    group.bench_function("log_example_r_quarter", |b| {
        b.iter(|| fit_supporting_plane(&dom, black_box(0.25), Side::Exterior, 360).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pucci, solver, modulus, geometry);
criterion_main!(benches);
