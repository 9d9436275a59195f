//! Command-line front end: run the symbolic and numeric verification suites
//! and the cohomology dimension tables, emitting machine-readable reports.
//!
//! Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
//! configuration error.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use zigzag_core::report::{
    run_cohomology, run_verify_pathspace, run_verify_zigzag, Report, SuiteConfig,
};

#[derive(Parser)]
#[command(
    name = "zigzag",
    version,
    about = "Verification suites for curved DGAs, the zigzag complex, and iterated integrals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// TOML configuration file (defaults apply when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report to stdout instead of the text summary.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact symbolic zigzag suite (axioms, D_z^2, Leibniz,
    /// homotopy, normalization confluence).
    VerifyZigzag(CommonOpts),
    /// Run the numeric path-space suite (transport, Stokes, chain map,
    /// algebra map, collapse triangle) with convergence gates.
    VerifyPathspace(CommonOpts),
    /// Compute curved cohomology dimension tables on a truncation window.
    Cohomology(CommonOpts),
}

fn load_config(opts: &CommonOpts) -> Result<SuiteConfig, String> {
    let mut cfg = match &opts.config {
        Some(p) => SuiteConfig::from_path(p).map_err(|e| e.to_string())?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn emit(report: &Report, opts: &CommonOpts) -> Result<(), String> {
    if let Some(path) = &opts.out {
        std::fs::write(path, report.to_json())
            .map_err(|e| format!("cannot write report to {}: {e}", path.display()))?;
    }
    if opts.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, runner): (&CommonOpts, fn(&SuiteConfig) -> Report) = match &cli.command {
        Command::VerifyZigzag(o) => (o, run_verify_zigzag),
        Command::VerifyPathspace(o) => (o, run_verify_pathspace),
        Command::Cohomology(o) => (o, run_cohomology),
    };
    let cfg = match load_config(opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = runner(&cfg);
    if let Err(e) = emit(&report, opts) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
