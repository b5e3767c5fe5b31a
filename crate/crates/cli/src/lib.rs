//! Batch driver for the `edm-pareto` diagnostics.

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod levy_spec;
pub mod output;

use std::fs::File;
use std::io::{BufWriter, Write};

use clap::Parser;

pub use config::{Cli, RunConfig};
pub use error::CliError;

/// Parses `args`, runs the command and writes its output. `Ok(None)` means
/// clap already printed help or version text.
pub fn execute<I, S>(args: I) -> Result<Option<()>, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(None);
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::Config(first.trim_start_matches("error: ").to_string()));
        }
    };
    let cfg = RunConfig::from_command(cli.command)?;
    let doc = commands::run(&cfg)?;
    let io_err = |e: std::io::Error| CliError::Config(format!("cannot write output: {e}"));
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    match cfg.format {
        config::Format::Csv => doc.write_csv(&mut sink),
        config::Format::Json => doc.write_json(&mut sink),
    }
    .map_err(io_err)?;
    sink.flush().map_err(io_err)?;
    Ok(Some(()))
}
