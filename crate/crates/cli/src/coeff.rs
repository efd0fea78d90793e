use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use gsh_core::hermite::{analyze, analyze_samples, default_quad_order, hermite_eval_multi, SampledFunction};
use gsh_core::hermite::{CoefficientField, FieldKind};
use gsh_core::io::{parse_box, parse_grid, parse_theta};
use gsh_core::weights::{AssocOptions, AssociatedFunctionTable};
use gsh_core::C64;

use crate::report::Report;
use crate::{CliError, CmdResult, KindArg, Outcome};

#[derive(Subcommand)]
pub enum CoeffCommand {
    /// Hermite coefficients of sampled data or a preset function.
    Analyze(AnalyzeArgs),
    /// Evaluate Σ a_n H_n on a grid.
    Synth(SynthArgs),
    /// Synthetic field a_n = exp(∓Σ M(θ_k √n_k)) (1 + |n|)^{-power}.
    Envelope(EnvelopeArgs),
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Sampled-function file, or a preset: gaussian, sech, hermite:K[,K..].
    #[arg(long)]
    input: String,
    /// Box orders, e.g. 32 or 16,16.
    #[arg(long = "box")]
    box_: String,
    /// Quadrature order per axis (default: largest box order + 16).
    #[arg(long)]
    quad: Option<usize>,
    #[arg(long, value_enum, default_value = "test")]
    kind: KindArg,
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long)]
    coeffs: PathBuf,
    /// a:b:n, or one range per axis separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args)]
pub struct EnvelopeArgs {
    #[arg(long)]
    seq: PathBuf,
    /// θ per axis, or one value for all axes.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long = "box")]
    box_: String,
    /// test: decaying exp(−Σ M); dual: growing exp(+Σ M).
    #[arg(long, value_enum, default_value = "test")]
    kind: KindArg,
    #[arg(long, default_value_t = 0.0)]
    power: f64,
}

pub fn run(cmd: &CoeffCommand) -> CmdResult {
    match cmd {
        CoeffCommand::Analyze(a) => analyze_cmd(a),
        CoeffCommand::Synth(a) => synth(a),
        CoeffCommand::Envelope(a) => envelope(a),
    }
}

enum Preset {
    Gaussian,
    Sech,
    Hermite(Vec<usize>),
}

fn parse_preset(s: &str, dim: usize) -> Result<Option<Preset>, CliError> {
    let p = match s {
        "gaussian" => Preset::Gaussian,
        "sech" => Preset::Sech,
        _ => match s.strip_prefix("hermite:") {
            Some(rest) => {
                let n = rest
                    .split(',')
                    .map(|k| k.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| CliError::Validation(format!("bad hermite index list {rest:?}")))?;
                if n.len() != dim {
                    return Err(CliError::Validation(format!("hermite preset needs {dim} indices")));
                }
                Preset::Hermite(n)
            }
            None => return Ok(None),
        },
    };
    Ok(Some(p))
}

fn analyze_cmd(a: &AnalyzeArgs) -> CmdResult {
    let shape = parse_box(&a.box_)?;
    let quad = a.quad.unwrap_or_else(|| default_quad_order(&shape));
    if quad < shape.max_order() {
        return Err(CliError::Validation(format!("quad order {quad} is below the box order {}", shape.max_order())));
    }
    let kind: FieldKind = a.kind.into();
    let mut report = Report::new("coeff analyze");
    report.config("input", &a.input);
    report.config("box", shape.orders());
    report.config("quad", quad);
    report.config("kind", kind);
    let field = match parse_preset(&a.input, shape.dim())? {
        Some(Preset::Gaussian) => analyze(|x| C64::new((-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0), &shape, Some(quad), kind)?,
        Some(Preset::Sech) => analyze(|x| C64::new(x.iter().map(|v| 1.0 / v.cosh()).product(), 0.0), &shape, Some(quad), kind)?,
        Some(Preset::Hermite(n)) => analyze(
            |x| C64::new(hermite_eval_multi(&n, x).unwrap_or(f64::NAN), 0.0),
            &shape,
            Some(quad),
            kind,
        )?,
        None => {
            let samples = SampledFunction::from_json_str(&report.read(Path::new(&a.input))?)?;
            analyze_samples(&samples, &shape, Some(quad), kind)?
        }
    };
    report.result("max_abs", field.max_abs());
    Ok(Outcome { report, data: Some(field.to_json_string()) })
}

fn synth(a: &SynthArgs) -> CmdResult {
    let mut report = Report::new("coeff synth");
    report.config("coeffs", a.coeffs.display().to_string());
    report.config("grid", &a.grid);
    let field = report.read_field(&a.coeffs)?;
    let grids = parse_grid(&a.grid, field.dim())?;
    let f = gsh_core::hermite::synthesize_grid(&field, &grids)?;
    let sup = f.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    report.result("sup_abs", sup);
    Ok(Outcome { report, data: Some(f.to_json_string()) })
}

pub fn envelope_field(
    table: &AssociatedFunctionTable,
    theta: &[f64],
    shape: gsh_core::hermite::BoxShape,
    kind: FieldKind,
    power: f64,
) -> Result<CoefficientField, CliError> {
    let sign = match kind {
        FieldKind::Test => -1.0,
        FieldKind::Dual => 1.0,
    };
    let mut err = None;
    let field = CoefficientField::from_fn(shape, kind, |n| {
        let w = table.log_weight(theta, n).unwrap_or_else(|e| {
            err.get_or_insert(e);
            0.0
        });
        let nu: usize = n.iter().sum();
        C64::new((sign * w - power * (1.0 + nu as f64).ln()).exp(), 0.0)
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(field?)
}

fn envelope(a: &EnvelopeArgs) -> CmdResult {
    let shape = parse_box(&a.box_)?;
    let theta = parse_theta(&a.theta, shape.dim())?;
    if !a.power.is_finite() {
        return Err(CliError::Validation("power must be finite".into()));
    }
    let kind: FieldKind = a.kind.into();
    let mut report = Report::new("coeff envelope");
    report.config("seq", a.seq.display().to_string());
    report.config("theta", &theta);
    report.config("box", shape.orders());
    report.config("kind", kind);
    report.config("power", a.power);
    let seq = report.read_seq(&a.seq)?;
    let table = AssociatedFunctionTable::new(&seq, AssocOptions::default());
    let field = envelope_field(&table, &theta, shape, kind, a.power)?;
    report.result("max_abs", field.max_abs());
    Ok(Outcome { report, data: Some(field.to_json_string()) })
}
