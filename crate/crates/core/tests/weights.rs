use gsh_core::weights::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn families() -> Vec<Family> {
    vec![
        Family::Gevrey { alpha: 0.5 },
        Family::Gevrey { alpha: 1.0 },
        Family::Gevrey { alpha: 2.0 },
        Family::PowerLog { s: 1.0, t: 1.0 },
        Family::ExpPower { r: 2.0 },
    ]
}

#[test]
fn shipped_families_are_log_convex() {
    for f in families() {
        let seq = make_sequence(f.clone(), 1000).unwrap();
        let r = check_m1(&seq).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{}", f.describe());
    }
}

#[test]
fn weight_function_rho_gives_p_log_p_minus_p() {
    let w = WeightFn::new("rho", |r| r);
    let seq = make_sequence(Family::FromWeightFn(w), 200).unwrap();
    for p in 1..=200u64 {
        let pf = p as f64;
        let want = pf * pf.ln() - pf;
        let got = seq.log_m(p).unwrap();
        assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "p = {p}: {got} vs {want}");
    }
}

#[test]
fn scan_equals_brute_force_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fams = [
        Family::Gevrey { alpha: 1.0 },
        Family::Gevrey { alpha: 0.5 },
        Family::Gevrey { alpha: 2.0 },
        Family::PowerLog { s: 1.0, t: 1.0 },
        Family::PowerLog { s: 0.5, t: 1.0 },
        Family::ExpPower { r: 1.5 },
    ];
    for _ in 0..100 {
        let f = fams[rng.gen_range(0..fams.len())].clone();
        let seq = make_sequence(f, 1000).unwrap();
        let rho = 10f64.powf(rng.gen_range(-2.0..4.0));
        let opts = AssocOptions { p_cap: 20_000, full_scan: false };
        let fast = associated_fn(&seq, rho, opts).unwrap();
        let slow = brute_force(&seq, rho, 20_000).unwrap();
        assert_eq!(fast.value.to_bits(), slow.value.to_bits());
        assert_eq!(fast.p_star, slow.p_star);
    }
}

#[test]
fn full_scan_handles_non_log_convex_tables() {
    // log-convexity broken at p = 2: a second bump beyond the first decrease
    let seq = WeightSequence::custom_from_logs(vec![0.0, 0.0, 5.0, 5.2, 5.4, 5.6]).unwrap();
    let rho = 2f64.exp();
    let opts = AssocOptions { p_cap: 5, full_scan: true };
    let r = associated_fn(&seq, rho, opts).unwrap();
    assert_eq!(r, brute_force(&seq, rho, 5).unwrap());
    assert_eq!(r.p_star, 5);
    let early = associated_fn(&seq, rho, AssocOptions { p_cap: 5, full_scan: false }).unwrap();
    assert_eq!(early.p_star, 1);
}

fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|alpha| Family::Gevrey { alpha }),
        (0.5f64..2.0, 0.0f64..2.0).prop_map(|(s, t)| Family::PowerLog { s, t }),
        (1.05f64..2.0).prop_map(|r| Family::ExpPower { r }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn associated_fn_monotone(f in family_strategy(), lo in -1.0f64..3.0, steps in 2usize..30) {
        let seq = make_sequence(f, 400).unwrap();
        let table = AssociatedFunctionTable::new(&seq, AssocOptions::default());
        let mut prev: Option<AssocValue> = None;
        for i in 0..steps {
            let rho = 10f64.powf(lo + 0.1 * i as f64);
            let v = table.get(rho).unwrap();
            if let Some(p) = prev {
                prop_assert!(v.value >= p.value);
                prop_assert!(v.p_star >= p.p_star);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn scan_matches_oracle(f in family_strategy(), e in -2.0f64..3.0) {
        let seq = make_sequence(f, 400).unwrap();
        let rho = 10f64.powf(e);
        let fast = associated_fn(&seq, rho, AssocOptions::default()).unwrap();
        let slow = brute_force(&seq, rho, DEFAULT_P_CAP).unwrap();
        prop_assert_eq!(fast.value.to_bits(), slow.value.to_bits());
    }

    #[test]
    fn beurling_implies_roumieu(f in family_strategy()) {
        let seq = make_sequence(f, 600).unwrap();
        let b = check_m3_nontrivial(&seq, NontrivialMode::Beurling).unwrap();
        let r = check_m3_nontrivial(&seq, NontrivialMode::Roumieu).unwrap();
        if b.verdict == Verdict::Holds {
            prop_assert_eq!(r.verdict, Verdict::Holds);
        }
    }

    #[test]
    fn closed_forms_are_log_convex(f in family_strategy()) {
        let seq = make_sequence(f, 300).unwrap();
        prop_assert_eq!(check_m1(&seq).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn spec_json_round_trips(alpha in 0.1f64..5.0, p in 2u64..5000) {
        let spec = SequenceSpec { family: FamilySpec::Gevrey { alpha }, p_max: Some(p) };
        let s = spec.to_json_string();
        let back = SequenceSpec::from_json_str(&s).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(back.to_json_string(), s);
    }
}
