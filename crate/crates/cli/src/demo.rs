use clap::Args;
use gsh_core::hermite::{BoxShape, CoefficientField, FieldKind};
use gsh_core::kernel::{apply_operator, kernel_uniqueness_probe, verify_kernel_identity, KernelCoefficients};
use gsh_core::structural::{round_trip, verify_bound};
use gsh_core::weights::{make_sequence, AssocOptions, AssociatedFunctionTable, Family};
use gsh_core::C64;
use serde_json::json;

use crate::coeff::envelope_field;
use crate::report::{c64, Report};
use crate::CmdResult;
use crate::Outcome;

#[derive(Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// One-dimensional box order.
    #[arg(long = "box", default_value_t = 64)]
    box_: usize,
}

fn check(report: &mut Report, checks: &mut Vec<serde_json::Value>, name: &str, value: f64, bound: f64) {
    let pass = value <= bound;
    checks.push(json!({ "name": name, "value": value, "bound": bound, "pass": pass }));
    if !pass {
        report.flag(format!("{name} failed"));
    }
}

/// Regularization round trip on a growth-envelope dual field and kernel
/// identities for the identity and Fourier kernels.
pub fn run(a: &DemoArgs) -> CmdResult {
    let mut report = Report::new("demo");
    report.config("mu", a.mu);
    report.config("box", a.box_);
    let shape = BoxShape::new(vec![a.box_])?;
    let seq = make_sequence(Family::Gevrey { alpha: 1.0 }, 1000)?;
    let table = AssociatedFunctionTable::new(&seq, AssocOptions::default());
    let mut checks = Vec::new();

    let b = envelope_field(&table, &[0.5], shape.clone(), FieldKind::Dual, 0.0)?;
    let b = CoefficientField::from_fn(shape.clone(), FieldKind::Dual, |n| {
        b.get(n) * C64::from_polar(1.0, 0.3 * n[0] as f64)
    })?;
    let phi = envelope_field(&table, &[2.0], shape.clone(), FieldKind::Test, 0.0)?;
    let rt = round_trip(&b, &seq, a.mu, &phi, 400)?;
    let (f, _) = gsh_core::structural::regularize(&b, &seq, a.mu)?;
    let bound = verify_bound(&f, a.box_ - 1)?;
    report.result(
        "structural",
        json!({
            "direct_pairing": c64(rt.direct),
            "series_pairing": c64(rt.series.value),
            "betas_used": rt.series.betas_used,
            "bound_sup": bound.sup,
            "bound_argsup": bound.argsup,
        }),
    );
    check(&mut report, &mut checks, "structural round trip", rt.relative_residual, 1e-8);
    check(&mut report, &mut checks, "bound table finite", if bound.sup.is_finite() { 0.0 } else { 1.0 }, 0.0);

    let k_shape = BoxShape::new(vec![8])?;
    let psi = CoefficientField::from_fn(k_shape.clone(), FieldKind::Test, |n| C64::new(1.0 / (1.0 + n[0] as f64), 0.25))?;
    let chi = CoefficientField::from_fn(k_shape.clone(), FieldKind::Test, |n| C64::new(0.5, (n[0] as f64).sin()))?;
    for (name, t) in [
        ("identity", KernelCoefficients::identity(k_shape.clone())?),
        ("fourier", KernelCoefficients::fourier(k_shape.clone())?),
    ] {
        let r = verify_kernel_identity(&t, &chi, &psi)?;
        check(&mut report, &mut checks, &format!("{name} kernel identity"), r.residual, 1e-13);
        check(&mut report, &mut checks, &format!("{name} uniqueness"), kernel_uniqueness_probe(&t)?, 1e-15);
    }
    let f4 = KernelCoefficients::fourier(k_shape)?;
    let mut x = chi.clone();
    for _ in 0..4 {
        x = apply_operator(&f4, &x)?.with_kind(FieldKind::Test);
    }
    let gap = x.data().iter().zip(chi.data()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    check(&mut report, &mut checks, "fourier fourth power", gap, 0.0);

    let all = checks.iter().all(|c| c["pass"] == json!(true));
    report.result("checks", checks);
    report.result("all_pass", all);
    Ok(Outcome::report(report))
}
