use gsh_core::hermite::*;
use gsh_core::spaces::*;
use gsh_core::weights::*;
use gsh_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gevrey1() -> AssociatedFunctionTable {
    let seq = make_sequence(Family::Gevrey { alpha: 1.0 }, 1000).unwrap();
    AssociatedFunctionTable::new(&seq, AssocOptions::default())
}

fn line(n: usize) -> BoxShape {
    BoxShape::new(vec![n]).unwrap()
}

fn random_field(rng: &mut ChaCha8Rng, shape: BoxShape, kind: FieldKind) -> CoefficientField {
    let data = (0..shape.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CoefficientField::new(shape, kind, data).unwrap()
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Σ x_i y_i with error-free products and compensated accumulation.
fn dot2(x: &[f64], y: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (a, b) in x.iter().zip(y) {
        let (p, e) = two_prod(*a, *b);
        let t = s + p;
        let bb = t - s;
        c += (s - (t - bb)) + (p - bb) + e;
        s = t;
    }
    s + c
}

#[test]
fn pairing_matches_compensated_dot() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..50 {
        let b = random_field(&mut rng, line(64), FieldKind::Dual);
        let a = random_field(&mut rng, line(64), FieldKind::Test);
        let br: Vec<f64> = b.data().iter().map(|z| z.re).collect();
        let bi: Vec<f64> = b.data().iter().map(|z| z.im).collect();
        let ar: Vec<f64> = a.data().iter().map(|z| z.re).collect();
        let ai: Vec<f64> = a.data().iter().map(|z| z.im).collect();
        let neg_bi: Vec<f64> = bi.iter().map(|v| -v).collect();
        let re = dot2(&[br.clone(), neg_bi].concat(), &[ar.clone(), ai.clone()].concat());
        let im = dot2(&[br, bi].concat(), &[ai, ar].concat());
        let want = C64::new(re, im);
        let got = parseval_pair(&b, &a).unwrap();
        assert!((got - want).norm() <= 1e-13 * want.norm());
    }
}

#[test]
fn pairing_matches_quadrature_of_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shape = line(16);
    let fc = random_field(&mut rng, shape.clone(), FieldKind::Dual);
    let phi = random_field(&mut rng, shape.clone(), FieldKind::Test);
    let f = |x: f64| synthesize_point(&fc, &[x]).unwrap();
    let b = analyze(|x| f(x[0]), &shape, Some(64), FieldKind::Dual).unwrap();
    // ∫ f φ dx = Σ w_i e^{x_i²} f(x_i) φ(x_i)
    let rule = gauss_hermite_rule(64).unwrap();
    let quad: C64 = rule
        .nodes
        .iter()
        .zip(&rule.scaled_weights)
        .map(|(&x, &w)| f(x) * synthesize_point(&phi, &[x]).unwrap() * w)
        .sum();
    let got = parseval_pair(&b, &phi).unwrap();
    assert!((got - quad).norm() <= 1e-9, "{got} vs {quad}");
}

#[test]
fn growth_check_and_dual_classify_agree() {
    let table = gevrey1();
    let theta0 = 1.0;
    let b = CoefficientField::from_fn(line(4096), FieldKind::Dual, |n| {
        let k = n[0].max(1) as f64;
        C64::new((table.value(theta0 * (n[0] as f64).sqrt()).unwrap() - 2.0 * k.ln()).exp(), 0.0)
    })
    .unwrap();
    let grid: Vec<Vec<f64>> = (1..=16).map(|k| vec![0.25 * k as f64]).collect();
    let report = classify(&b, &table, &grid, MembershipKind::DualRoumieu).unwrap();
    let classify_star = report.theta_star.unwrap()[0];
    let growth_star = grid
        .iter()
        .find(|t| growth_check(&b, &table, t).unwrap().passes)
        .unwrap()[0];
    assert!((classify_star - growth_star).abs() <= 0.25 + 1e-12, "{classify_star} vs {growth_star}");
    assert!((growth_star - theta0).abs() <= 0.25 + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weighted_norm_monotone_in_theta(seed in any::<u64>(), t1 in 0.01f64..3.0, dt in 0.0f64..3.0) {
        let table = gevrey1();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_field(&mut rng, BoxShape::new(vec![12, 9]).unwrap(), FieldKind::Test);
        let lo = weighted_norm(&a, &table, &[t1, t1]).unwrap();
        let hi = weighted_norm(&a, &table, &[t1 + dt, t1]).unwrap();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn pairing_bilinear(seed in any::<u64>(), alpha_re in -2.0f64..2.0, alpha_im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = BoxShape::new(vec![20]).unwrap();
        let b = random_field(&mut rng, shape.clone(), FieldKind::Dual);
        let a1 = random_field(&mut rng, shape.clone(), FieldKind::Test);
        let a2 = random_field(&mut rng, shape, FieldKind::Test);
        let alpha = C64::new(alpha_re, alpha_im);
        let lhs = parseval_pair(&b, &a1.scale(alpha).add(&a2).unwrap()).unwrap();
        let rhs = alpha * parseval_pair(&b, &a1).unwrap() + parseval_pair(&b, &a2).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + lhs.norm()));
    }

    #[test]
    fn finite_support_is_stable(n in 0usize..10, th in 0.1f64..5.0) {
        let table = gevrey1();
        let a = CoefficientField::unit(BoxShape::new(vec![32]).unwrap(), &[n], FieldKind::Test).unwrap();
        let grid = vec![vec![th], vec![2.0 * th]];
        for kind in [MembershipKind::TestRoumieu, MembershipKind::DualBeurling] {
            let r = classify(&a, &table, &grid, kind).unwrap();
            prop_assert!(r.stable.iter().all(|&s| s));
        }
    }
}
