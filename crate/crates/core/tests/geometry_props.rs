use lab_core::geometry::{angle_between, angle_of, fit_supporting_plane, limit_normal, DEFAULT_ANGLE_SAMPLES};
use lab_core::{check_reifenberg, GraphDomain2D, Modulus, Profile, Side};
use proptest::prelude::*;

fn base_domain() -> impl Strategy<Value = GraphDomain2D> {
    prop_oneof![
        (-0.8f64..0.8).prop_map(|s| GraphDomain2D::tilted(s, 1.0).unwrap()),
        Just(GraphDomain2D::new(Profile::PowerCusp { exponent: 1.5 }, 1.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn frames_rotate_with_the_domain(dom in base_domain(), phi in -3.0f64..3.0, r in 0.05f64..0.8) {
        let a = fit_supporting_plane(&dom, r, Side::Exterior, DEFAULT_ANGLE_SAMPLES).unwrap();
        let b = fit_supporting_plane(&dom.clone().rotated(phi), r, Side::Exterior, DEFAULT_ANGLE_SAMPLES).unwrap();
        let turned = angle_of(b.normal) - angle_of(a.normal) - phi;
        let wrapped = (turned + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
        prop_assert!(wrapped.abs() < 2e-3, "turned by {wrapped}");
        prop_assert!((a.slack - b.slack).abs() < 2e-3);
    }

    #[test]
    fn frames_dilate_with_the_domain(dom in base_domain(), s in 0.2f64..4.0, r in 0.05f64..0.8) {
        let a = fit_supporting_plane(&dom, r, Side::Exterior, DEFAULT_ANGLE_SAMPLES).unwrap();
        let b = fit_supporting_plane(&dom.clone().dilated(s), s * r, Side::Exterior, DEFAULT_ANGLE_SAMPLES).unwrap();
        prop_assert!(angle_between(a.normal, b.normal) < 1e-6);
        prop_assert!((a.slack - b.slack).abs() < 1e-9);
    }

    #[test]
    fn half_planes_are_flat_from_both_sides(slope in -1.0f64..1.0, r in 0.05f64..1.0) {
        let dom = GraphDomain2D::tilted(slope, 1.0).unwrap();
        let ext = fit_supporting_plane(&dom, r, Side::Exterior, DEFAULT_ANGLE_SAMPLES).unwrap();
        let int = fit_supporting_plane(&dom, r, Side::Interior, DEFAULT_ANGLE_SAMPLES).unwrap();
        prop_assert!(ext.slack.abs() < 1e-9 && int.slack.abs() < 1e-9);
        prop_assert!(angle_between(ext.normal, int.normal) < 1e-6);
    }
}

#[test]
fn certifying_under_a_smaller_modulus_certifies_under_a_larger_one() {
    let dom = GraphDomain2D::log_example();
    let small = Modulus::inv_log_sq();
    let large = Modulus::scaled(Modulus::inv_log_sq(), 2.0).unwrap();
    let a = check_reifenberg(&dom, &small, Side::Exterior, 0.5, 10).unwrap();
    assert!(a.passed);
    let b = check_reifenberg(&dom, &large, Side::Exterior, 0.5, 10).unwrap();
    assert!(b.passed);
    assert!(b.fitted_k <= a.fitted_k + 1e-12);
}

#[test]
fn normals_satisfy_the_cauchy_bound() {
    let cert = check_reifenberg(&GraphDomain2D::log_example(), &Modulus::inv_log_sq(), Side::Exterior, 0.5, 12).unwrap();
    let lim = limit_normal(&cert).unwrap();
    assert!(lim.cauchy_tail.iter().all(|c| c.holds), "{:?}", lim.cauchy_tail);
}
