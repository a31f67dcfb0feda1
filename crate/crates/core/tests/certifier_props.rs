use lab_core::certifier::{select_constants_hopf, select_constants_lipschitz, verify_constants, KEta, ProofInputs};
use lab_core::{scale_sequence, Ellipticity, Modulus};
use proptest::prelude::*;

fn inputs() -> impl Strategy<Value = ProofInputs> {
    (0.5f64..20.0, 0.5f64..20.0, 0.5f64..20.0, 1.0f64..50.0, 0.1f64..0.9).prop_map(|(c1, c2, c3, k, alpha)| ProofInputs {
        ellipticity: Ellipticity::new(1.0, 2.0).unwrap(),
        alpha,
        c1,
        c2,
        c3,
        k_eta: KEta::constant(k),
        modulus: None,
    })
}

fn builtin_dini() -> Vec<Modulus> {
    vec![
        Modulus::power(1.0).unwrap(),
        Modulus::power(0.5).unwrap(),
        Modulus::power(0.1).unwrap(),
        Modulus::inv_log_sq(),
        Modulus::zero(1.0),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selected_constants_pass_the_independent_check(inp in inputs(), delta1 in 1e-6f64..0.5, c2b in 0.01f64..1.0) {
        let lip = select_constants_lipschitz(&inp).unwrap();
        prop_assert!(verify_constants(&lip).iter().all(|c| c.holds && c.slack >= 0.0));
        let hopf = select_constants_hopf(&inp, delta1, c2b).unwrap();
        prop_assert!(verify_constants(&hopf).iter().all(|c| c.holds && c.slack >= 0.0));
        prop_assert!(hopf.eta <= delta1);
    }

    #[test]
    fn k_and_c3_monotonicity(inp in inputs(), factor in 1.0f64..20.0) {
        let base = select_constants_lipschitz(&inp).unwrap();
        let k = match inp.k_eta { KEta::Constant { k } | KEta::LogScaled { k } => k };
        let bigger_k = ProofInputs { k_eta: KEta::constant(k * factor), ..inp.clone() };
        prop_assert!(select_constants_lipschitz(&bigger_k).unwrap().c0 <= base.c0);
        let bigger_c3 = ProofInputs { c3: inp.c3 * factor, ..inp.clone() };
        prop_assert!(select_constants_lipschitz(&bigger_c3).unwrap().c_hat >= base.c_hat);
    }

    #[test]
    fn sequences_from_selected_constants_satisfy_the_sum_bound(inp in inputs()) {
        let pc = select_constants_lipschitz(&inp).unwrap();
        for m in builtin_dini() {
            let s = scale_sequence(&m, pc.eta, pc.alpha0, pc.c0, 40).unwrap();
            prop_assert!(s.bound_applicable);
            prop_assert_eq!(s.passed, Some(true));
            prop_assert!(s.recursion_bounds_hold);
        }
    }
}

#[test]
fn big_a_decays_for_dini_moduli() {
    for m in builtin_dini() {
        let s = scale_sequence(&m, 1e-4, 0.25, 0.01, 400).unwrap();
        assert!(*s.big_a.last().unwrap() < 1e-3 * 0.01, "{m:?}");
    }
}

#[test]
fn k_binding_scales_c0_inversely() {
    let mk = |k: f64| {
        select_constants_lipschitz(&ProofInputs {
            k_eta: KEta::constant(k),
            ..ProofInputs::default()
        })
        .unwrap()
        .c0
    };
    let (c50, c500) = (mk(50.0), mk(500.0));
    assert!((c50 / c500 - 10.0).abs() < 1e-9, "{c50} {c500}");
    assert!(mk(10.0) <= mk(1.0));
}

#[test]
fn hopf_a_sequence_stays_below_half_a_tilde() {
    let pc = select_constants_hopf(&ProofInputs::default(), 0.25, 0.1).unwrap();
    let s = scale_sequence(&Modulus::inv_log_sq(), pc.eta, pc.alpha0, pc.c0, 60).unwrap();
    let a = s.extremal_a(pc.c_bar * pc.c_hat);
    let a_tilde = pc.a_tilde.unwrap();
    assert!(a.iter().all(|v| *v <= 0.5 * a_tilde * (1.0 + 1e-12)), "{a:?}");
}
