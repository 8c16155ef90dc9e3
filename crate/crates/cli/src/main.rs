use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fecarbon_cli::args::{Cli, Format};
use fecarbon_cli::error::{CliError, CliResult};

fn write_file(path: &std::path::Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

fn main_inner(cli: &Cli) -> CliResult<()> {
    let run = fecarbon_cli::run(cli)?;
    for w in &run.report.warnings {
        eprintln!("warning: {w}");
    }
    for (path, contents) in &run.files {
        write_file(path, contents)?;
    }
    let text = match cli.global.format {
        Format::Table => run.table.to_text(),
        Format::Csv => run.table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&run.report)? + "\n",
    };
    match &cli.global.out {
        Some(path) => write_file(path, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Validation(format!("cannot write output: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
