use lab_core::fdsolver::{solve, BoundaryData, GridDomain, Shape, SolveOptions};
use lab_core::grid::GridFunction;
use lab_core::{Ellipticity, OpMode, StencilSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1.0 / 16.0;

fn tight() -> SolveOptions {
    SolveOptions {
        tol: Some(1e-11),
        ..SolveOptions::default()
    }
}

fn data(seed: u64) -> (BoundaryData, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let g = BoundaryData::function(move |p, _| c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * (3.0 * p[0]).sin());
    let f = (0..4096).map(|_| rng.random_range(-2.0..2.0)).collect();
    (g, f)
}

fn field(dom: &GridDomain, vals: &[f64], shift: f64) -> GridFunction {
    let mut f = GridFunction::constant(dom.grid, 0.0);
    for (k, v) in f.values.iter_mut().enumerate() {
        *v = vals[k % vals.len()] + shift;
    }
    f
}

fn max_diff(a: &GridFunction, b: &GridFunction, dom: &GridDomain) -> f64 {
    dom.nodes.iter().map(|&i| (a.values[i] - b.values[i]).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn comparison_principle(seed in any::<u64>(), dg in 0.0f64..0.5, df in 0.0f64..1.0) {
        let dom = GridDomain::build(Shape::half_disc(1.0), H).unwrap();
        let e = Ellipticity::new(1.0, 2.0).unwrap();
        let (g, f) = data(seed);
        let g2 = {
            let g = g.clone();
            BoundaryData::function(move |p, part| g.eval(p, part) + dg)
        };
        let f1 = field(&dom, &f, df);
        let f2 = field(&dom, &f, 0.0);
        for mode in [OpMode::Sup, OpMode::Inf] {
            let (u1, _) = solve(&dom, mode, e, Some(&f1), &g, &tight()).unwrap();
            let (u2, _) = solve(&dom, mode, e, Some(&f2), &g2, &tight()).unwrap();
            for &i in &dom.nodes {
                prop_assert!(u1.values[i] <= u2.values[i] + 1e-8);
            }
        }
    }

    #[test]
    fn positive_homogeneity(seed in any::<u64>(), c in 0.1f64..5.0) {
        let dom = GridDomain::build(Shape::half_disc(1.0), H).unwrap();
        let e = Ellipticity::new(0.5, 2.0).unwrap();
        let (g, f) = data(seed);
        let f1 = field(&dom, &f, 0.0);
        let (u, _) = solve(&dom, OpMode::Sup, e, Some(&f1), &g, &tight()).unwrap();
        let (uc, _) = solve(&dom, OpMode::Sup, e, Some(&f1.scaled(c)), &g.scaled(c), &tight()).unwrap();
        prop_assert!(max_diff(&uc, &u.scaled(c), &dom) <= 1e-7 * (1.0 + c));
    }
}

#[test]
fn inf_solution_lies_below_sup_solution() {
    let dom = GridDomain::build(Shape::half_cube(1.0), H).unwrap();
    let e = Ellipticity::new(1.0, 4.0).unwrap();
    let g = BoundaryData::function(|p, _| (4.0 * p[0]).cos() + p[1]);
    let (lo, _) = solve(&dom, OpMode::Inf, e, None, &g, &tight()).unwrap();
    let (hi, _) = solve(&dom, OpMode::Sup, e, None, &g, &tight()).unwrap();
    assert!(dom.nodes.iter().all(|&i| lo.values[i] <= hi.values[i] + 1e-9));
    assert!(max_diff(&lo, &hi, &dom) > 1e-3);
}

#[test]
fn equal_constants_reduce_to_laplace() {
    let dom = GridDomain::build(Shape::half_disc(1.0), H).unwrap();
    let e = Ellipticity::new(1.5, 1.5).unwrap();
    let g = BoundaryData::function(|p, _| p[0] * p[0] - 0.5 * p[1] + (2.0 * p[1]).exp());
    let (lap, _) = solve(&dom, OpMode::Laplace, e, None, &g, &tight()).unwrap();
    let axis = SolveOptions {
        stencil: StencilSet::axis(),
        ..tight()
    };
    for mode in [OpMode::Sup, OpMode::Inf] {
        let (u, _) = solve(&dom, mode, e, None, &g, &axis).unwrap();
        assert!(max_diff(&u, &lap, &dom) < 1e-8, "{mode:?}");
        // Rotated pairs are a different consistent discretization.
        let (w, _) = solve(&dom, mode, e, None, &g, &tight()).unwrap();
        assert!(max_diff(&w, &lap, &dom) < 1e-2, "{mode:?}");
    }
}

#[test]
fn refinement_differences_shrink() {
    let e = Ellipticity::new(1.0, 2.0).unwrap();
    let probes = [[0.0, 0.25], [0.25, 0.25], [-0.5, 0.375]];
    let sol = |h: f64| {
        let dom = GridDomain::build(Shape::half_disc(1.0), h).unwrap();
        let (u, _) = solve(&dom, OpMode::Sup, e, None, &BoundaryData::zero_one(), &SolveOptions::default()).unwrap();
        probes.map(|p| u.at(p).unwrap())
    };
    let (a, b, c) = (sol(1.0 / 8.0), sol(1.0 / 16.0), sol(1.0 / 32.0));
    let d1 = (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
    let d2 = (0..3).map(|i| (b[i] - c[i]).abs()).fold(0.0, f64::max);
    assert!(d2 < d1, "{d1} {d2}");
}
