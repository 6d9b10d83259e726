//! Command-line front end: configuration, subcommands and artifact encoding.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;

pub use commands::{execute, Report};
pub use config::{Cli, Command, OutputFormat, RunConfig, Settings};
pub use error::{CliError, Result};

/// Runs the subcommand and writes its artifact to the configured output
/// (stdout when unset). Returns an error after writing when checks failed.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let report = execute(cfg)?;
    let text = report.render(cfg.format());
    match &cfg.settings.output {
        Some(path) => std::fs::write(path, text.as_bytes())?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    if report.failed {
        return Err(CliError::VerificationFailed);
    }
    Ok(())
}
