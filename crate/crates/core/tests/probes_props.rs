use lab_core::fdsolver::{GridDomain, Shape};
use lab_core::grid::GridFunction;
use lab_core::probes::{c1alpha_fit, hopf_probe, lipschitz_probe};
use proptest::prelude::*;

fn field(dom: &GridDomain, k: f64) -> GridFunction {
    GridFunction::from_fn(dom.grid, |p| p[1] * (1.0 + k * p[0]) + 0.5 * p[1] * p[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lipschitz_quotients_scale_linearly(c in 0.01f64..50.0, k in -1.0f64..1.0) {
        let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 32.0).unwrap();
        let u = field(&dom, k);
        let scales = [0.1, 0.2, 0.4, 0.8];
        let a = lipschitz_probe(&u, &dom, &scales).unwrap();
        let b = lipschitz_probe(&u.scaled(c), &dom, &scales).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            prop_assert!((y.1 - c * x.1).abs() <= 1e-12 * c * (1.0 + x.1));
        }
    }

    #[test]
    fn hopf_ratio_is_scale_invariant(c in 0.01f64..50.0, k in -0.5f64..0.5, angle in 0.3f64..2.8) {
        let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 32.0).unwrap();
        let u = field(&dom, k);
        let l = [angle.cos(), angle.sin()];
        let ts = [0.05, 0.1, 0.2];
        let a = hopf_probe(&u, &dom, l, &ts).unwrap();
        let b = hopf_probe(&u.scaled(c), &dom, l, &ts).unwrap();
        prop_assert!((a.c_min - b.c_min).abs() <= 1e-12 * a.c_min.abs().max(1.0));
    }

    #[test]
    fn nonnegative_fields_have_quotient_equal_to_growth(k in -0.5f64..0.5) {
        let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 32.0).unwrap();
        let u = field(&dom, k);
        let t = lipschitz_probe(&u, &dom, &[0.25, 0.5]).unwrap();
        for &(r, q) in &t.rows {
            let sup = dom
                .nodes
                .iter()
                .map(|&i| (dom.grid.point(i), u.values[i]))
                .filter(|(p, _)| (p[0] * p[0] + p[1] * p[1]).sqrt() <= r * (1.0 + 1e-12))
                .map(|(_, v)| v)
                .fold(0.0, f64::max);
            prop_assert!((q * r - sup).abs() < 1e-12);
        }
    }
}

#[test]
fn c1alpha_recovers_slope_and_exponent() {
    let dom = GridDomain::build(Shape::half_disc(1.0), 1.0 / 64.0).unwrap();
    let scales = [0.05, 0.1, 0.2, 0.4, 0.8];
    for a in [0.5, 1.0, 2.0] {
        for alpha in [0.3, 0.5, 0.9] {
            let u = GridFunction::from_fn(dom.grid, |p| a * p[1] + 0.7 * p[1].max(0.0).powf(1.0 + alpha));
            let fit = c1alpha_fit(&u, &dom, &scales).unwrap();
            assert!((fit.a - a).abs() < 1e-6, "a = {a}, α = {alpha}: {fit:?}");
            assert!((fit.alpha_hat - alpha).abs() < 0.1, "a = {a}, α = {alpha}: {fit:?}");
        }
    }
}
