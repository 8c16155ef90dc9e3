//! Command-line front end: resolves parameter files, runs an analysis and
//! packages the results with an echo of every input so the run can be replayed.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod inputs;
pub mod report;

use std::path::{Path, PathBuf};

use args::{Cli, Command};
use error::{CliError, CliResult};
use inputs::InputEcho;
use report::{CarbonReport, Table, ToolInfo, REPORT_SCHEMA_VERSION};

/// A finished invocation, ready to render.
pub struct Run {
    pub report: CarbonReport,
    pub table: Table,
    pub files: Vec<(PathBuf, String)>,
}

pub fn run(cli: &Cli) -> CliResult<Run> {
    if let Command::Replay(r) = &cli.command {
        return replay(&r.report);
    }
    let echo = InputEcho::load(&cli.global, &cli.command)?;
    let resolved = echo.resolve()?;
    let out = commands::execute(&cli.command, cli.global.seed, &resolved)?;
    Ok(Run {
        report: CarbonReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: ToolInfo::current(),
            command: cli.command.clone(),
            seed: cli.global.seed,
            inputs: echo,
            results: out.results,
            warnings: out.warnings,
        },
        table: out.table,
        files: out.files,
    })
}

/// Re-runs the command stored in a report from its echoed inputs and checks the
/// results match. Side files are not rewritten.
pub fn replay(path: &Path) -> CliResult<Run> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::MissingInput(format!("{}: {e}", path.display())))?;
    let report: CarbonReport = serde_json::from_str(&text)?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported report schema_version {}",
            report.schema_version
        )));
    }
    let resolved = report.inputs.resolve()?;
    let out = commands::execute(&report.command, report.seed, &resolved)?;
    if out.results != report.results {
        return Err(CliError::Inconsistent(format!(
            "replaying {} does not reproduce its results",
            path.display()
        )));
    }
    Ok(Run {
        report: CarbonReport {
            tool: ToolInfo::current(),
            results: out.results,
            warnings: out.warnings,
            ..report
        },
        table: out.table,
        files: Vec::new(),
    })
}
