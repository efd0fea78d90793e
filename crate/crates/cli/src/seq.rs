use std::fmt::Write;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use gsh_core::io::parse_range;
use gsh_core::weights::{
    check_m1, check_m2, check_m3_nontrivial, check_m3_quasi, AssocOptions, AssociatedFunctionTable,
    NontrivialMode, DEFAULT_P_CAP,
};

use crate::report::Report;
use crate::{CliError, CmdResult, Outcome};

#[derive(Subcommand)]
pub enum SeqCommand {
    /// Check the standard conditions on the materialized prefix.
    Check(CheckArgs),
    /// Tabulate the associated function M(ρ) as two columns.
    Assoc(AssocArgs),
}

#[derive(Args)]
pub struct CheckArgs {
    spec: PathBuf,
    /// Comma list from m1, m2, m3q, m3r, m3b.
    #[arg(long, default_value = "m1,m2,m3q,m3r,m3b")]
    conditions: String,
}

#[derive(Args)]
pub struct AssocArgs {
    spec: PathBuf,
    /// ρ grid as a:b:n.
    #[arg(long, allow_hyphen_values = true)]
    rho_grid: String,
    #[arg(long, default_value_t = DEFAULT_P_CAP)]
    p_cap: u64,
    /// Scan every p up to the cap instead of the monotone search.
    #[arg(long)]
    full_scan: bool,
}

pub fn run(cmd: &SeqCommand) -> CmdResult {
    match cmd {
        SeqCommand::Check(a) => check(a),
        SeqCommand::Assoc(a) => assoc(a),
    }
}

fn check(a: &CheckArgs) -> CmdResult {
    let names: Vec<&str> = a.conditions.split(',').map(str::trim).collect();
    for n in &names {
        if !["m1", "m2", "m3q", "m3r", "m3b"].contains(n) {
            return Err(CliError::Validation(format!("unknown condition {n:?}")));
        }
    }
    let mut report = Report::new("seq check");
    report.config("spec", a.spec.display().to_string());
    report.config("conditions", &names);
    let seq = report.read_seq(&a.spec)?;
    report.result("sequence", seq.family().describe());
    report.result("p_max", seq.p_max());
    let mut out = Vec::new();
    for n in names {
        let r = match n {
            "m1" => check_m1(&seq)?,
            "m2" => check_m2(&seq)?,
            "m3q" => check_m3_quasi(&seq)?,
            "m3r" => check_m3_nontrivial(&seq, NontrivialMode::Roumieu)?,
            _ => check_m3_nontrivial(&seq, NontrivialMode::Beurling)?,
        };
        out.push(r);
    }
    report.result("conditions", out);
    Ok(Outcome::report(report))
}

fn assoc(a: &AssocArgs) -> CmdResult {
    let range = parse_range(&a.rho_grid)?;
    if range.start < 0.0 {
        return Err(CliError::Validation("rho must be nonnegative".into()));
    }
    if a.p_cap == 0 {
        return Err(CliError::Validation("p-cap must be positive".into()));
    }
    let mut report = Report::new("seq assoc");
    report.config("spec", a.spec.display().to_string());
    report.config("rho_grid", &a.rho_grid);
    report.config("p_cap", a.p_cap);
    report.config("full_scan", a.full_scan);
    let seq = report.read_seq(&a.spec)?;
    let table = AssociatedFunctionTable::new(&seq, AssocOptions { p_cap: a.p_cap, full_scan: a.full_scan });
    let mut text = String::new();
    let mut saturated = 0usize;
    for rho in range.points() {
        let v = table.get(rho)?;
        if v.saturated {
            saturated += 1;
        }
        writeln!(text, "{rho:e} {:e}", v.value).expect("string write");
    }
    report.result("points", range.count);
    report.result("saturated_points", saturated);
    if saturated > 0 {
        report.flag(format!("associated function saturated at {saturated} grid points"));
    }
    Ok(Outcome { report, data: Some(text) })
}
