//! `gsh`: command-line front end for the Gelfand-Shilov Hermite toolkit.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (or a flagged
//! result under `--strict`).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

mod coeff;
mod demo;
mod kernel;
pub mod report;
mod seq;
mod theory;

use report::Report;

#[derive(Parser)]
#[command(name = "gsh", version, about = "Hermite-spectral toolkit for Gelfand-Shilov spaces")]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Global {
    /// Worker threads for internal parallelism.
    #[arg(long, global = true, env = "GSH_THREADS")]
    threads: Option<usize>,
    /// Exit with status 2 when a result carries a saturation, exhaustion or
    /// convergence flag.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Weight sequences.
    #[command(subcommand)]
    Seq(seq::SeqCommand),
    /// Coefficient fields.
    #[command(subcommand)]
    Coeff(coeff::CoeffCommand),
    /// Probe weighted norms of a field along a θ grid.
    Classify(theory::ClassifyArgs),
    /// Pair a dual field with a test field.
    Pair(theory::PairArgs),
    /// Divide dual coefficients by the regularizing divisor.
    Regularize(theory::RegularizeArgs),
    /// Rebuild a pairing through the oscillator-power series.
    Reconstruct(theory::ReconstructArgs),
    /// Kernel coefficients.
    #[command(subcommand)]
    Kernel(kernel::KernelCommand),
    /// Run both theorem pipelines on built-in data.
    Demo(demo::DemoArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Test,
    Dual,
}

impl From<KindArg> for gsh_core::hermite::FieldKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Test => gsh_core::hermite::FieldKind::Test,
            KindArg::Dual => gsh_core::hermite::FieldKind::Dual,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<gsh_core::Error> for CliError {
    fn from(e: gsh_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

/// What a command produced: a report and optionally a data product.
pub struct Outcome {
    pub report: Report,
    pub data: Option<String>,
}

impl Outcome {
    pub fn report(report: Report) -> Self {
        Outcome { report, data: None }
    }
}

pub type CmdResult = Result<Outcome, CliError>;

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

/// Data goes to `--out` or stdout. The report goes to `--report`, and to
/// stdout when there is no data product (stderr otherwise).
fn emit(global: &Global, outcome: &Outcome, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let report = outcome.report.to_pretty();
    if let Some(p) = &global.report {
        write(p, &report)?;
    }
    let io = |e: std::io::Error| CliError::Validation(format!("cannot write output: {e}"));
    match &outcome.data {
        Some(data) => {
            match &global.out {
                Some(p) => write(p, data)?,
                None => stdout.write_all(data.as_bytes()).map_err(io)?,
            }
            if global.report.is_none() {
                stderr.write_all(report.as_bytes()).map_err(io)?;
            }
        }
        None => stdout.write_all(report.as_bytes()).map_err(io)?,
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Seq(c) => seq::run(c),
        Command::Coeff(c) => coeff::run(c),
        Command::Classify(a) => theory::classify(a),
        Command::Pair(a) => theory::pair(a),
        Command::Regularize(a) => theory::regularize(a),
        Command::Reconstruct(a) => theory::reconstruct(a),
        Command::Kernel(c) => kernel::run(c),
        Command::Demo(a) => demo::run(a),
    }
}

/// Parse `args` (program name first), run, and return the exit status.
/// `--threads` configures the global rayon pool on first use only.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            let _ = writeln!(stderr, "gsh: --threads must be at least 1");
            return 1;
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = dispatch(&cli).and_then(|outcome| {
        emit(&cli.global, &outcome, stdout, stderr)?;
        Ok(outcome.report.flags.is_empty())
    });
    match result {
        Ok(true) => 0,
        Ok(false) if cli.global.strict => 2,
        Ok(false) => 0,
        Err(CliError::Validation(m)) => {
            let _ = writeln!(stderr, "gsh: {m}");
            1
        }
        Err(CliError::Numerical(m)) => {
            let _ = writeln!(stderr, "gsh: numerical failure: {m}");
            2
        }
    }
}
