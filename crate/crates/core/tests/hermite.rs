use gsh_core::hermite::*;
use gsh_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Double-double arithmetic for the recurrence oracle.
#[derive(Clone, Copy, Debug)]
struct Dd(f64, f64);

impl Dd {
    fn from(x: f64) -> Dd {
        Dd(x, 0.0)
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let t = Dd::two_sum(self.1, o.1);
        let hi = Dd::two_sum(s.0, s.1 + t.0);
        Dd::two_sum(hi.0, hi.1 + t.1)
    }

    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        Dd::two_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.0 / o.0;
        let r = self.add(o.mul(Dd::from(q1)).neg());
        let q2 = r.0 / o.0;
        let r = r.add(o.mul(Dd::from(q2)).neg());
        let q3 = r.0 / o.0;
        Dd::two_sum(q1, q2).add(Dd::from(q3))
    }

    fn sqrt(self) -> Dd {
        let g = Dd::from(self.0.sqrt());
        // one Newton step doubles the precision
        g.add(self.div(g)).mul(Dd::from(0.5))
    }

    fn scale(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd(self.0 * f, self.1 * f)
    }
}

/// h_n(x) via the normalized recurrence in double-double with a power-of-two
/// exponent carried alongside; the Gaussian factor is applied in log form.
fn oracle(n: usize, x: f64) -> f64 {
    let pi_quarter = Dd::from(std::f64::consts::PI).sqrt().sqrt();
    let mut prev = Dd::from(0.0);
    let mut cur = Dd::from(1.0).div(pi_quarter);
    let mut exp2 = 0i32;
    let xd = Dd::from(x);
    for k in 0..n {
        let kk = Dd::from(k as f64);
        let k1 = Dd::from(k as f64 + 1.0);
        let a = Dd::from(2.0).div(k1).sqrt();
        let b = kk.div(k1).sqrt();
        let next = a.mul(xd).mul(cur).add(b.mul(prev).neg());
        prev = cur;
        cur = next;
        if cur.0.abs() > 1e100 {
            prev = prev.scale(-332);
            cur = cur.scale(-332);
            exp2 += 332;
        }
    }
    let ln = cur.0.abs().ln() + (cur.1 / cur.0).ln_1p() + exp2 as f64 * std::f64::consts::LN_2 - 0.5 * x * x;
    cur.0.signum() * ln.exp()
}

#[test]
fn recurrence_matches_double_double_at_degree_500() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-40.0..40.0);
        let want = oracle(500, x);
        let got = hermite_eval(500, x).unwrap();
        let rel = (got - want).abs() / want.abs();
        worst = worst.max(rel);
    }
    assert!(worst <= 1e-9, "worst relative error {worst:e}");
}

/// Physicists' H_n as integer coefficients.
fn physicists(n: usize) -> Vec<i128> {
    let mut prev = vec![1i128];
    let mut cur = vec![0i128, 2];
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let mut next = vec![0i128; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= 2 * k as i128 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

#[test]
fn degree_ten_matches_exact_rational() {
    // H_10(13/10) = Σ c_i 13^i 10^{10-i} / 10^10, exactly in integers
    let coeffs = physicists(10);
    assert_eq!(coeffs[10], 1024);
    assert_eq!(coeffs[0], -30240);
    let num: i128 = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * 13i128.pow(i as u32) * 10i128.pow(10 - i as u32))
        .sum();
    let h10 = num as f64 / 1e10;
    let norm = (1024.0 * 3_628_800.0 * std::f64::consts::PI.sqrt()).sqrt();
    let want = h10 * (-0.5f64 * 1.69).exp() / norm;
    let got = hermite_eval(10, 1.3).unwrap();
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
}

#[test]
fn orthonormal_through_degree_200() {
    let rule = gauss_hermite_rule(256).unwrap();
    let table: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_eval_all(200, x)).collect();
    let mut worst = 0.0f64;
    for m in 0..=200 {
        for n in m..=200 {
            let s: f64 = table
                .iter()
                .zip(&rule.scaled_weights)
                .map(|(h, w)| w * h[m] * h[n])
                .sum();
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn number_operator_exact_in_coefficients() {
    for n in 0..40 {
        let e = CoefficientField::unit(BoxShape::new(vec![41]).unwrap(), &[n], FieldKind::Test).unwrap();
        let got = ladder_apply(&e, LadderOp::Number(0)).unwrap();
        assert_eq!(got.data(), e.scale(C64::new(n as f64, 0.0)).data());
        let dd = ladder_apply(&ladder_apply(&e, LadderOp::Derivative(0)).unwrap(), LadderOp::Derivative(0)).unwrap();
        let xx = ladder_apply(&ladder_apply(&e, LadderOp::Position(0)).unwrap(), LadderOp::Position(0)).unwrap();
        let composed = xx.add(&dd.scale(C64::new(-1.0, 0.0))).unwrap().add(&e.scale(C64::new(-1.0, 0.0)).resized(xx.shape().clone()).unwrap()).unwrap().scale(C64::new(0.5, 0.0));
        for (k, z) in composed.iter() {
            let want = if k[0] == n { n as f64 } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}

fn fd_error(n: usize, h: f64) -> f64 {
    let f = |x: f64| hermite_eval(n, x).unwrap();
    linspace(-4.0, 4.0, 81)
        .into_iter()
        .map(|x| {
            let lap = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let nh = 0.5 * (-lap + x * x * f(x) - f(x));
            (nh - n as f64 * f(x)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn eigenrelation_second_order_on_grids() {
    for n in [1, 4, 9] {
        let coarse = fd_error(n, 0.02);
        let fine = fd_error(n, 0.01);
        assert!(coarse / fine >= 3.8, "n = {n}: {coarse:e} / {fine:e}");
    }
}

#[test]
fn quadrature_recovers_unit_vectors() {
    for k in [0usize, 3, 17, 40] {
        let shape = BoxShape::new(vec![k + 5]).unwrap();
        let a = analyze(|x| C64::new(hermite_eval(k, x[0]).unwrap(), 0.0), &shape, Some(k + 1 + 4), FieldKind::Test).unwrap();
        for (n, z) in a.iter() {
            let want = if n[0] == k { 1.0 } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() < 1e-12, "k {k} n {n:?} {z}");
        }
    }
}

fn field(shape: BoxShape) -> impl Strategy<Value = CoefficientField> {
    let len = shape.len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |v| {
        CoefficientField::new(shape.clone(), FieldKind::Test, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesis_then_analysis_is_identity(a in field(BoxShape::new(vec![12]).unwrap())) {
        let back = analyze(|x| synthesize_point(&a, x).unwrap(), a.shape(), None, FieldKind::Test).unwrap();
        for (p, q) in back.data().iter().zip(a.data()) {
            prop_assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn two_dim_synthesis_then_analysis(a in field(BoxShape::new(vec![5, 4]).unwrap())) {
        let back = analyze(|x| synthesize_point(&a, x).unwrap(), a.shape(), None, FieldKind::Test).unwrap();
        for (p, q) in back.data().iter().zip(a.data()) {
            prop_assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn clenshaw_matches_direct_sum(a in field(BoxShape::new(vec![30]).unwrap()), x in -8.0f64..8.0) {
        let direct: C64 = a.data().iter().enumerate().map(|(n, z)| z * hermite_eval(n, x).unwrap()).sum();
        let scale: f64 = a.data().iter().map(|z| z.norm()).sum();
        prop_assert!((clenshaw(a.data(), x) - direct).norm() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn field_json_is_bit_exact(a in field(BoxShape::new(vec![3, 2]).unwrap())) {
        let s = a.to_json_string();
        let back = CoefficientField::from_json_str(&s).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_json_string(), s);
    }
}
