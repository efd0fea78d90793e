use std::fmt::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use gsh_core::io::{parse_f64_list, parse_theta_grid};
use gsh_core::spaces::{classify as classify_field, compensated_sum, parseval_pair, MembershipKind};
use gsh_core::structural::{oscillator_series_pair, regularize as regularize_field, relative_gap, verify_bound, DivisorEvaluation};
use gsh_core::weights::{AssocOptions, AssociatedFunctionTable};

use crate::report::{c64, path_str, Report};
use crate::{CliError, CmdResult, KindArg, Outcome};

#[derive(Clone, Copy, ValueEnum)]
pub enum Variant {
    Roumieu,
    Beurling,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    coeffs: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "roumieu")]
    variant: Variant,
    /// θ probes as a:b:n or a comma list, increasing.
    #[arg(long, allow_hyphen_values = true)]
    theta_grid: String,
}

#[derive(Args)]
pub struct PairArgs {
    #[arg(long)]
    dual: PathBuf,
    #[arg(long)]
    test: PathBuf,
}

#[derive(Args)]
pub struct RegularizeArgs {
    #[arg(long)]
    dual: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Extra μ values whose divisor diagnostics go into the report.
    #[arg(long, allow_hyphen_values = true)]
    mu_sweep: Option<String>,
    /// Tabulate n²|a_n| ‖H_n‖_∞ (one-dimensional fields).
    #[arg(long)]
    verify_bound: bool,
    /// Write the bound table as two columns here.
    #[arg(long)]
    bound_table: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReconstructArgs {
    /// Regularized field f.
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 400)]
    beta_max: usize,
    /// Original dual field; without it the direct pairing uses Σ a_n D_μ(ν) φ_n.
    #[arg(long)]
    dual: Option<PathBuf>,
}

fn check_mu(mu: f64) -> Result<(), CliError> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("mu must be positive, got {mu}")))
    }
}

pub fn classify(a: &ClassifyArgs) -> CmdResult {
    let kind = match (a.kind, a.variant) {
        (KindArg::Test, Variant::Roumieu) => MembershipKind::TestRoumieu,
        (KindArg::Test, Variant::Beurling) => MembershipKind::TestBeurling,
        (KindArg::Dual, Variant::Roumieu) => MembershipKind::DualRoumieu,
        (KindArg::Dual, Variant::Beurling) => MembershipKind::DualBeurling,
    };
    let mut report = Report::new("classify");
    report.config("coeffs", a.coeffs.display().to_string());
    report.config("seq", a.seq.display().to_string());
    report.config("kind", kind);
    report.config("theta_grid", &a.theta_grid);
    let field = report.read_field(&a.coeffs)?;
    let grid = parse_theta_grid(&a.theta_grid, field.dim())?;
    if grid.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(CliError::Validation("theta grid must be increasing".into()));
    }
    let seq = report.read_seq(&a.seq)?;
    let table = AssociatedFunctionTable::new(&seq, AssocOptions::default());
    let r = classify_field(&field, &table, &grid, kind)?;
    if r.at_boundary {
        report.flag("theta* lies at the edge of the probed grid");
    }
    report.result("membership", r);
    Ok(Outcome::report(report))
}

pub fn pair(a: &PairArgs) -> CmdResult {
    let mut report = Report::new("pair");
    report.config("dual", a.dual.display().to_string());
    report.config("test", a.test.display().to_string());
    let b = report.read_field(&a.dual)?;
    let phi = report.read_field(&a.test)?;
    report.result("value", c64(parseval_pair(&b, &phi)?));
    Ok(Outcome::report(report))
}

pub fn regularize(a: &RegularizeArgs) -> CmdResult {
    check_mu(a.mu)?;
    let sweep = match &a.mu_sweep {
        Some(s) => parse_f64_list(s)?,
        None => Vec::new(),
    };
    for &m in &sweep {
        check_mu(m)?;
    }
    let mut report = Report::new("regularize");
    report.config("dual", a.dual.display().to_string());
    report.config("seq", a.seq.display().to_string());
    report.config("mu", a.mu);
    report.config("mu_sweep", &sweep);
    report.config("verify_bound", a.verify_bound);
    report.config("bound_table", path_str(&a.bound_table));
    let b = report.read_field(&a.dual)?;
    let seq = report.read_seq(&a.seq)?;
    let (f, div) = regularize_field(&b, &seq, a.mu)?;
    let summary = |d: &DivisorEvaluation| {
        serde_json::json!({
            "mu": d.mu,
            "log_divisor_max": d.entries.last().map(|e| e.log_value),
            "max_terms_used": d.entries.iter().map(|e| e.terms_used).max(),
            "tail_flag": d.tail_flag,
        })
    };
    report.result("divisor", summary(&div));
    if div.tail_flag {
        report.flag("divisor truncated at the sequence prefix");
    }
    let nu_max: usize = b.shape().orders().iter().map(|o| o - 1).sum();
    let swept = sweep
        .iter()
        .map(|&m| Ok(summary(&DivisorEvaluation::new(&seq, m, nu_max)?)))
        .collect::<Result<Vec<_>, gsh_core::Error>>()?;
    report.result("mu_sweep", swept);
    report.result("f_max_abs", f.max_abs());
    if a.verify_bound || a.bound_table.is_some() {
        let up_to = f.shape().orders()[0] - 1;
        let t = verify_bound(&f, up_to)?;
        report.result("bound_sup", t.sup);
        report.result("bound_argsup", t.argsup);
        if let Some(p) = &a.bound_table {
            let mut text = String::new();
            for (n, s) in &t.rows {
                writeln!(text, "{n} {s:e}").expect("string write");
            }
            crate::write(p, &text)?;
        }
    }
    Ok(Outcome { report, data: Some(f.to_json_string()) })
}

pub fn reconstruct(a: &ReconstructArgs) -> CmdResult {
    check_mu(a.mu)?;
    let mut report = Report::new("reconstruct");
    report.config("f", a.f.display().to_string());
    report.config("test", a.test.display().to_string());
    report.config("seq", a.seq.display().to_string());
    report.config("mu", a.mu);
    report.config("beta_max", a.beta_max);
    report.config("dual", path_str(&a.dual));
    let f = report.read_field(&a.f)?;
    let phi = report.read_field(&a.test)?;
    let seq = report.read_seq(&a.seq)?;
    let series = oscillator_series_pair(&f, &seq, a.mu, &phi, a.beta_max)?;
    let direct = match &a.dual {
        Some(p) => {
            let b = report.read_field(p)?;
            parseval_pair(&b, &phi)?
        }
        None => {
            let nu_max: usize = f.shape().orders().iter().map(|o| o - 1).sum();
            let div = DivisorEvaluation::new(&seq, a.mu, nu_max)?;
            let common = f.shape().intersect(phi.shape())?;
            compensated_sum(common.indices().map(|n| f.get(&n) * div.entry(&n).value * phi.get(&n)))
        }
    };
    let residual = relative_gap(series.value, direct);
    report.result("direct_pairing", c64(direct));
    report.result("series_pairing", c64(series.value));
    report.result("relative_residual", residual);
    report.result("tail_estimate", series.tail_estimate);
    report.result("betas_used", series.betas_used);
    report.result("converged", series.converged);
    if !series.converged {
        report.flag("oscillator series stopped at beta_max before its tail criterion");
    }
    Ok(Outcome::report(report))
}
