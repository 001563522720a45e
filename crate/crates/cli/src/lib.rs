//! Command-line front end for `qbs-core`.
//!
//! Reads a JSON [`config::RunConfig`], runs one command and writes a
//! [`report::RunReport`] (or a CSV table) to standard output.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod tolerances;

use std::time::Instant;

use commands::{Command, Outcome, RunContext};
use config::{OutputFormat, Validated};
use error::CliError;
use report::{CommandEcho, RunReport};
use tolerances::Tolerances;

#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub seed: Option<u64>,
    pub csv: bool,
    pub tolerances: Vec<(String, f64)>,
    pub timing: bool,
}

/// Rendered output plus whether every checked invariant held.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub text: String,
    pub passed: bool,
    pub violations: Vec<String>,
}

pub fn execute(
    command: Command,
    config: &Validated,
    inv: &Invocation,
) -> Result<Rendered, CliError> {
    let start = Instant::now();
    let seed = inv.seed.or(config.raw.seed);
    let tolerances = Tolerances::resolve(&config.raw.tolerances, &inv.tolerances);
    let ctx = RunContext {
        config,
        seed,
        tolerances: &tolerances,
    };
    let Outcome {
        results,
        table,
        violations,
    } = commands::run(command, &ctx)?;
    let passed = violations.is_empty();

    let csv = inv.csv || config.raw.output == Some(OutputFormat::Csv);
    let text = if csv {
        table
            .ok_or_else(|| CliError::Usage(format!("{} has no CSV form", command.name())))?
            .to_csv()?
    } else {
        let report = RunReport {
            schema_version: report::REPORT_SCHEMA_VERSION,
            version: format!("qbs {}", env!("CARGO_PKG_VERSION")),
            command: CommandEcho {
                name: command.name().to_string(),
                seed,
                tolerances: tolerances.as_map().clone(),
            },
            config: config.raw.clone(),
            results,
            violations: violations.clone(),
            passed,
            wall_time_seconds: inv.timing.then(|| start.elapsed().as_secs_f64()),
        };
        report::to_json(&report)?
    };
    Ok(Rendered {
        text,
        passed,
        violations,
    })
}
