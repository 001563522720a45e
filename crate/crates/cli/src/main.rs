use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qbs_cli::commands::Command;
use qbs_cli::error::{CliError, EXIT_INVARIANT, EXIT_OK};
use qbs_cli::{config, execute, tolerances, Invocation};

/// Finite-dimensional quantum Black-Scholes: coefficients, checks and prices.
#[derive(Debug, Parser)]
#[command(name = "qbs", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Write the flat result table as CSV instead of the JSON report.
    #[arg(long)]
    csv: bool,

    /// Seed for stochastic commands; overrides the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Tolerance override, NAME=VALUE; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,

    /// Add wall time to the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

fn run(args: &Args) -> Result<qbs_cli::Rendered, CliError> {
    let tolerances = args
        .tol
        .iter()
        .map(|t| tolerances::parse_assignment(t))
        .collect::<Result<Vec<_>, _>>()?;
    let path = args.config.display().to_string();
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::Io {
        path,
        reason: e.to_string(),
    })?;
    let cfg = config::parse_config(&text)?;
    let inv = Invocation {
        seed: args.seed,
        csv: args.csv,
        tolerances,
        timing: args.timing,
    };
    execute(args.command, &cfg, &inv)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(out) => {
            print!("{}", out.text);
            for v in &out.violations {
                eprintln!("invariant violated: {v}");
            }
            ExitCode::from(if out.passed { EXIT_OK } else { EXIT_INVARIANT })
        }
        Err(e) => {
            eprintln!("qbs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
