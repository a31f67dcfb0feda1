use lab_core::modulus::dini_integral_between;
use lab_core::{dini_integral, rescale_radius, Modulus};
use proptest::prelude::*;

fn dini_family() -> impl Strategy<Value = Modulus> {
    prop_oneof![
        (0.05f64..2.0).prop_map(|a| Modulus::power(a).unwrap()),
        Just(Modulus::inv_log_sq()),
    ]
}

fn integral(m: &Modulus, r0: f64) -> f64 {
    let v = dini_integral(m, r0, 1e-10).unwrap();
    assert!(v.is_dini);
    v.integral_estimate
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_is_additive(m in dini_family(), a in 0.01f64..0.1, b in 0.1f64..0.3) {
        let c = 0.45;
        let ab = dini_integral_between(&m, a, b, 1e-10).unwrap();
        let bc = dini_integral_between(&m, b, c, 1e-10).unwrap();
        let ac = dini_integral_between(&m, a, c, 1e-10).unwrap();
        prop_assert!((ab + bc - ac).abs() <= 2e-10 * (1.0 + ac));
        let whole = integral(&m, b) + bc;
        prop_assert!((whole - integral(&m, c)).abs() <= 1e-8 * (1.0 + whole));
    }

    #[test]
    fn integral_is_monotone_in_radius(m in dini_family(), r in 0.01f64..0.4, dr in 0.0f64..0.09) {
        prop_assert!(integral(&m, r) <= integral(&m, r + dr) + 1e-9);
    }

    #[test]
    fn max_of_is_dominated_by_sum(a in 0.1f64..2.0, r in 0.05f64..0.5) {
        let p = Modulus::power(a).unwrap().with_radius(0.5).unwrap();
        let l = Modulus::inv_log_sq();
        let mx = Modulus::max_of(vec![p.clone(), l.clone()]).unwrap();
        prop_assert!(integral(&mx, r) <= integral(&p, r) + integral(&l, r) + 1e-8);
    }

    #[test]
    fn scaling_scales_the_integral(m in dini_family(), c in 0.1f64..10.0, r in 0.05f64..0.5) {
        let s = Modulus::scaled(m.clone(), c).unwrap();
        let base = integral(&m, r);
        prop_assert!((integral(&s, r) - c * base).abs() <= 1e-8 * (1.0 + c * base));
    }

    #[test]
    fn inv_log_is_divergent_everywhere(r in 1e-6f64..0.5) {
        prop_assert!(!dini_integral(&Modulus::inv_log(), r, 1e-8).unwrap().is_dini);
    }

    #[test]
    fn rescaled_radius_meets_both_conditions(m in dini_family(), c0 in 1e-3f64..0.3) {
        let r1 = rescale_radius(&m, c0).unwrap();
        prop_assert!(r1 > 0.0 && r1 <= m.domain_radius);
        prop_assert!(m.eval(r1).unwrap() <= c0 * (1.0 + 1e-9));
        prop_assert!(integral(&m, r1) <= c0 * (1.0 + 1e-6));
    }
}
