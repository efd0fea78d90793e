use gsh_core::hermite::*;
use gsh_core::kernel::*;
use gsh_core::spaces::{parseval_pair, weighted_norm};
use gsh_core::weights::*;
use gsh_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(rng: &mut ChaCha8Rng, shape: &BoxShape) -> CoefficientField {
    let data = (0..shape.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CoefficientField::new(shape.clone(), FieldKind::Test, data).unwrap()
}

fn random_kernel(rng: &mut ChaCha8Rng, out: &BoxShape, inp: &BoxShape) -> KernelCoefficients {
    let data = (0..out.len() * inp.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    KernelCoefficients::new(out.clone(), inp.clone(), data).unwrap()
}

#[test]
fn tensor_of_analyses_is_analysis_of_product() {
    let f = |x: f64| (-(x - 0.3).powi(2)).exp();
    let g = |y: f64| 1.0 / (1.0 + y * y) * (-0.5 * y * y).exp();
    let s = BoxShape::new(vec![10]).unwrap();
    let af = analyze(|x| C64::new(f(x[0]), 0.0), &s, Some(80), FieldKind::Test).unwrap();
    let ag = analyze(|x| C64::new(g(x[0]), 0.0), &s, Some(80), FieldKind::Test).unwrap();
    let prod = analyze(|x| C64::new(f(x[0]) * g(x[1]), 0.0), &BoxShape::new(vec![10, 10]).unwrap(), Some(80), FieldKind::Test).unwrap();
    let t = tensor(&af, &ag).unwrap();
    for (p, q) in t.data().iter().zip(prod.data()) {
        assert!((p - q).norm() < 1e-10);
    }
}

#[test]
fn random_pair_kernel_matches_compensated_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = BoxShape::new(vec![16]).unwrap();
    let t = random_kernel(&mut rng, &s, &s);
    let big = random_field(&mut rng, &BoxShape::new(vec![16, 16]).unwrap());
    // sum the products sorted by magnitude in extended width via two-sum chains
    let mut parts: Vec<C64> = big.iter().map(|(nk, z)| t.get(&nk[..1], &nk[1..]) * z).collect();
    parts.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    let mut acc = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for z in parts {
        let s1 = acc.0 + z.re;
        acc.1 += (acc.0 - s1) + z.re;
        acc.0 = s1;
        let s2 = acc.2 + z.im;
        acc.3 += (acc.2 - s2) + z.im;
        acc.2 = s2;
    }
    let want = C64::new(acc.0 + acc.1, acc.2 + acc.3);
    let got = pair_kernel(&t, &big).unwrap();
    assert!((got - want).norm() <= 1e-13 * want.norm().max(1.0));
}

#[test]
fn continuity_along_decaying_fields() {
    let seq = make_sequence(Family::Gevrey { alpha: 1.0 }, 400).unwrap();
    let table = AssociatedFunctionTable::new(&seq, AssocOptions::default());
    let s = BoxShape::new(vec![16]).unwrap();
    let heat = KernelCoefficients::heat(s.clone(), 0.2).unwrap();
    assert!(kernel_growth_check(&heat, &table, &[1.0], &[1.0]).unwrap().passes);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = random_field(&mut rng, &s);
    let psi = random_field(&mut rng, &s);
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for j in 0..12 {
        let phi_j = base.scale(C64::new(0.5f64.powi(j), 0.0));
        let norm = weighted_norm(&phi_j, &table, &[1.0]).unwrap();
        let pairing = parseval_pair(&apply_operator(&heat, &phi_j).unwrap(), &psi).unwrap().norm();
        assert!(norm < prev.0 && pairing < prev.1);
        prev = (norm, pairing);
    }
    assert!(prev.1 < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn apply_is_linear(seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = BoxShape::new(vec![6]).unwrap();
        let inp = BoxShape::new(vec![4, 3]).unwrap();
        let t = random_kernel(&mut rng, &out, &inp);
        let p1 = random_field(&mut rng, &inp);
        let p2 = random_field(&mut rng, &inp);
        let lhs = apply_operator(&t, &p1.scale(C64::new(c, 0.5)).add(&p2).unwrap()).unwrap();
        let r1 = apply_operator(&t, &p1).unwrap();
        let r2 = apply_operator(&t, &p2).unwrap();
        for ((l, a), b) in lhs.data().iter().zip(r1.data()).zip(r2.data()) {
            prop_assert!((l - (a * C64::new(c, 0.5) + b)).norm() <= 1e-13 * (1.0 + l.norm()));
        }
    }

    #[test]
    fn fourier_fourth_power_is_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = BoxShape::new(vec![5, 4]).unwrap();
        let f = KernelCoefficients::fourier(s.clone()).unwrap();
        let phi = random_field(&mut rng, &s);
        let mut x = phi.clone();
        for _ in 0..4 {
            x = apply_operator(&f, &x).unwrap().with_kind(FieldKind::Test);
        }
        prop_assert_eq!(x.data(), phi.data());
    }

    #[test]
    fn build_from_pairing_recovers_kernel(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = BoxShape::new(vec![4]).unwrap();
        let inp = BoxShape::new(vec![3, 3]).unwrap();
        let t0 = random_kernel(&mut rng, &out, &inp);
        let form = |psi: &CoefficientField, phi: &CoefficientField| pair_kernel(&t0, &tensor(psi, phi)?);
        let t = kernel_from_bilinear(&form, &out, &inp).unwrap();
        prop_assert_eq!(&t, &t0);
        let back = KernelCoefficients::from_json_str(&t.to_json_string()).unwrap();
        prop_assert!(kernel_uniqueness_probe(&back).unwrap() <= 1e-15);
    }
}
