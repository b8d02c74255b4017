//! Command-line front end: runs a configured suite and writes the report.
//!
//! Exit codes: 0 when every case passes, 1 when the suite ran but at least
//! one case failed, 2 for configuration, usage, or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qftv::config::{load_config, ExperimentConfig, SuiteKind};
use qftv::report::{render, write_report, ReportFormat};
use qftv::suite::run_suite;

#[derive(Parser)]
#[command(
    name = "qftv",
    version,
    about = "Channel-level Fourier-transform verification and solver certification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact closeness audits and transport identities over channel sets.
    Audit(RunArgs),
    /// Shot-based protocol calibration against the exact measures.
    Verify(RunArgs),
    /// Solver-pipeline fidelity and distance certification.
    Certify(RunArgs),
    /// Built-in separation demonstration (config optional).
    Demo(DemoArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment description (TOML).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DemoArgs {
    /// Experiment description (TOML); defaults to the built-in demo run.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Replace the config's master seed before running (and before hashing).
    #[arg(long, value_name = "SEED")]
    seed_override: Option<u64>,
    /// Report destination; overrides the config's `out`, defaults to stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Report rendering.
    #[arg(long, value_enum, default_value_t = FormatArg::Structured)]
    format: FormatArg,
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    /// JSON record.
    Structured,
    /// Tab-separated table with `#`-prefixed header lines.
    Tabular,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Structured => ReportFormat::Structured,
            FormatArg::Tabular => ReportFormat::Tabular,
        }
    }
}

/// Suites each command is allowed to run.
fn allowed(cmd: &Cmd) -> &'static [SuiteKind] {
    match cmd {
        Cmd::Audit(_) => &[SuiteKind::ClosenessAudit, SuiteKind::TheoremS3],
        Cmd::Verify(_) => &[SuiteKind::ProtocolCalibration],
        Cmd::Certify(_) => &[
            SuiteKind::HhlPerfect,
            SuiteKind::HhlGeneral,
            SuiteKind::HhlUnitaryInverse,
            SuiteKind::HhlCpMode,
        ],
        Cmd::Demo(_) => &[SuiteKind::AdversarialDemo],
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Audit(_) => "audit",
        Cmd::Verify(_) => "verify",
        Cmd::Certify(_) => "certify",
        Cmd::Demo(_) => "demo",
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let (mut cfg, common) = match &cli.cmd {
        Cmd::Audit(a) | Cmd::Verify(a) | Cmd::Certify(a) => {
            let cfg = load_config(&a.config)
                .map_err(|e| format!("{}: {e}", a.config.display()))?;
            (cfg, &a.common)
        }
        Cmd::Demo(a) => {
            let cfg = match &a.config {
                Some(path) => {
                    load_config(path).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => ExperimentConfig::demo_default(),
            };
            (cfg, &a.common)
        }
    };

    let suites = allowed(&cli.cmd);
    if !suites.contains(&cfg.suite) {
        let names: Vec<_> = suites.iter().map(|s| s.name()).collect();
        return Err(format!(
            "suite \"{}\" cannot run under `{}` (expected one of: {})",
            cfg.suite.name(),
            command_name(&cli.cmd),
            names.join(", ")
        ));
    }

    if let Some(seed) = common.seed_override {
        cfg.seed = seed;
    }

    let record = run_suite(&cfg).map_err(|e| e.to_string())?;
    let rendered = render(&record, ReportFormat::from(common.format));
    let dest = common.out.clone().or_else(|| cfg.out.clone());
    match dest {
        Some(path) => {
            write_report(&path, &rendered)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            eprintln!(
                "{}: {} cases, {} passed, {} failed -> {}",
                record.suite,
                record.summary.total,
                record.summary.passed,
                record.summary.failed,
                path.display()
            );
        }
        None => print!("{rendered}"),
    }
    Ok(record.all_pass())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
