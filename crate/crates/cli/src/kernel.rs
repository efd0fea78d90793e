use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use gsh_core::hermite::{total_order, BoxShape, CoefficientField, FieldKind};
use gsh_core::io::{parse_box, parse_theta};
use gsh_core::kernel::{
    apply_operator, kernel_from_bilinear, kernel_growth_check, kernel_uniqueness_probe, pair_kernel, tensor,
    verify_kernel_identity, Bilinear, DotForm, KernelCoefficients, OriginForm,
};
use gsh_core::weights::{AssocOptions, AssociatedFunctionTable};
use gsh_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::Report;
use crate::{CliError, CmdResult, Outcome};

#[derive(Subcommand)]
pub enum KernelCommand {
    /// Extract t_{(n,k)} = B(e_n, e_k) from a bilinear form.
    Build(BuildArgs),
    /// Apply the operator of a kernel to a coefficient field.
    Apply(ApplyArgs),
    /// Check ⟨Kφ, ψ⟩ = K(ψ ⊗ φ) on random fields and the uniqueness probe.
    Verify(VerifyArgs),
    /// Fit |t_{(n,k)}| ≤ C exp[2Σ M(θ√n) + 2Σ M(ν√k)].
    Growth(GrowthArgs),
}

#[derive(Args)]
pub struct BuildArgs {
    /// dot, origin, fourier, heat:τ, rank-one, or a kernel file.
    #[arg(long)]
    bilinear: String,
    /// Output and input boxes as `out;in`, e.g. `8;8` or `8;4,4`.
    #[arg(long)]
    boxes: String,
}

#[derive(Args)]
pub struct ApplyArgs {
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
pub struct GrowthArgs {
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    /// Output-side θ, one per axis or one for all.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    /// Input-side ν, one per axis or one for all.
    #[arg(long, allow_hyphen_values = true)]
    nu: String,
}

pub fn run(cmd: &KernelCommand) -> CmdResult {
    match cmd {
        KernelCommand::Build(a) => build(a),
        KernelCommand::Apply(a) => apply(a),
        KernelCommand::Verify(a) => verify(a),
        KernelCommand::Growth(a) => growth(a),
    }
}

/// Σ_n c(ν(n)) ψ_n φ_n for diagonal presets.
struct DiagonalForm<F: Fn(usize) -> C64 + Sync>(F);

impl<F: Fn(usize) -> C64 + Sync> Bilinear for DiagonalForm<F> {
    fn eval(&self, psi: &CoefficientField, phi: &CoefficientField) -> gsh_core::Result<C64> {
        let common = psi.shape().intersect(phi.shape())?;
        Ok(common.indices().map(|n| (self.0)(total_order(&n)) * psi.get(&n) * phi.get(&n)).sum())
    }
}

/// ψ ↦ Σ 2^{-ν(n)} ψ_n times φ ↦ Σ (−1)^{ν(k)}/(1 + ν(k)) φ_k.
struct RankOneForm;

impl Bilinear for RankOneForm {
    fn eval(&self, psi: &CoefficientField, phi: &CoefficientField) -> gsh_core::Result<C64> {
        let left: C64 = psi.iter().map(|(n, z)| z * 0.5f64.powi(total_order(&n) as i32)).sum();
        let right: C64 = phi
            .iter()
            .map(|(k, z)| {
                let nu = total_order(&k);
                let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
                z * (sign / (1.0 + nu as f64))
            })
            .sum();
        Ok(left * right)
    }
}

fn fourier_factor(nu: usize) -> C64 {
    [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0)][nu % 4]
}

fn parse_boxes(s: &str) -> Result<(BoxShape, BoxShape), CliError> {
    let (out, inp) = s
        .split_once(';')
        .ok_or_else(|| CliError::Validation(format!("expected out;in boxes, got {s:?}")))?;
    Ok((parse_box(out)?, parse_box(inp)?))
}

fn build(a: &BuildArgs) -> CmdResult {
    let (out_shape, in_shape) = parse_boxes(&a.boxes)?;
    let mut report = Report::new("kernel build");
    report.config("bilinear", &a.bilinear);
    report.config("out_box", out_shape.orders());
    report.config("in_box", in_shape.orders());
    let same = || {
        if out_shape == in_shape {
            Ok(())
        } else {
            Err(CliError::Validation(format!("preset {:?} needs equal boxes", a.bilinear)))
        }
    };
    let t = match a.bilinear.as_str() {
        "dot" => {
            same()?;
            kernel_from_bilinear(&DotForm, &out_shape, &in_shape)?
        }
        "origin" => kernel_from_bilinear(&OriginForm, &out_shape, &in_shape)?,
        "fourier" => {
            same()?;
            kernel_from_bilinear(&DiagonalForm(fourier_factor), &out_shape, &in_shape)?
        }
        "rank-one" => kernel_from_bilinear(&RankOneForm, &out_shape, &in_shape)?,
        other => match other.strip_prefix("heat:") {
            Some(tau) => {
                let tau: f64 = tau
                    .parse()
                    .ok()
                    .filter(|t: &f64| t.is_finite() && *t >= 0.0)
                    .ok_or_else(|| CliError::Validation(format!("bad heat time {tau:?}")))?;
                same()?;
                report.config("tau", tau);
                kernel_from_bilinear(&DiagonalForm(|nu| C64::new((-tau * nu as f64).exp(), 0.0)), &out_shape, &in_shape)?
            }
            None => {
                let t0 = report.read_kernel(Path::new(other))?;
                let form = |psi: &CoefficientField, phi: &CoefficientField| pair_kernel(&t0, &tensor(psi, phi)?);
                kernel_from_bilinear(&form, &out_shape, &in_shape)?
            }
        },
    };
    report.result("entries", t.data().len());
    Ok(Outcome { report, data: Some(t.to_json_string()) })
}

fn apply(a: &ApplyArgs) -> CmdResult {
    let mut report = Report::new("kernel apply");
    report.config("kernel", a.kernel.display().to_string());
    report.config("input", a.input.display().to_string());
    let t = report.read_kernel(&a.kernel)?;
    let phi = report.read_field(&a.input)?;
    let out = apply_operator(&t, &phi)?;
    report.result("max_abs", out.max_abs());
    Ok(Outcome { report, data: Some(out.to_json_string()) })
}

fn random_field(rng: &mut ChaCha8Rng, shape: &BoxShape) -> CoefficientField {
    let data = (0..shape.len())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    CoefficientField::new(shape.clone(), FieldKind::Test, data).expect("finite random field")
}

fn verify(a: &VerifyArgs) -> CmdResult {
    let mut report = Report::new("kernel verify");
    report.config("kernel", a.kernel.display().to_string());
    report.config("trials", a.trials);
    report.config("seed", a.seed);
    let t = report.read_kernel(&a.kernel)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut residual, mut relative) = (0.0f64, 0.0f64);
    for _ in 0..a.trials {
        let phi = random_field(&mut rng, t.in_shape());
        let psi = random_field(&mut rng, t.out_shape());
        let r = verify_kernel_identity(&t, &phi, &psi)?;
        residual = residual.max(r.residual);
        relative = relative.max(r.relative);
    }
    report.result("max_residual", residual);
    report.result("max_relative_residual", relative);
    report.result("uniqueness_discrepancy", kernel_uniqueness_probe(&t)?);
    Ok(Outcome::report(report))
}

fn growth(a: &GrowthArgs) -> CmdResult {
    let mut report = Report::new("kernel growth");
    report.config("kernel", a.kernel.display().to_string());
    report.config("seq", a.seq.display().to_string());
    let t: KernelCoefficients = report.read_kernel(&a.kernel)?;
    let theta = parse_theta(&a.theta, t.l())?;
    let nu = parse_theta(&a.nu, t.s())?;
    report.config("theta", &theta);
    report.config("nu", &nu);
    let seq = report.read_seq(&a.seq)?;
    let table = AssociatedFunctionTable::new(&seq, AssocOptions::default());
    let g = kernel_growth_check(&t, &table, &theta, &nu)?;
    report.result("passes", g.passes);
    report.result("log_c", g.log_c);
    Ok(Outcome::report(report))
}
