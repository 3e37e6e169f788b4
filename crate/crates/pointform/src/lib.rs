//! Command-line driver for the point-form four-momentum library: config
//! parsing, stamped output files and the five subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

use serde_json::{json, Value};

pub use commands::Outcome;
pub use config::{Overrides, RunConfig};
pub use error::CliError;
use output::{json_artifact, write_atomic, Stamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Spectrum,
    SolveAlpha,
    ModelN1,
    FormFactor,
}

impl Command {
    /// Name used in reports and as the stem of the JSON file.
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::SolveAlpha => "solve-alpha",
            Command::ModelN1 => "model-n1",
            Command::FormFactor => "form-factor",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::SolveAlpha => "solve_alpha",
            Command::ModelN1 => "model_n1",
            Command::FormFactor => "form_factor",
        }
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let stamp = Stamp::new(cfg.sha256());
    match command {
        Command::Verify => commands::cmd_verify(cfg, &stamp),
        Command::Spectrum => commands::cmd_spectrum(cfg, &stamp),
        Command::SolveAlpha => commands::cmd_solve_alpha(cfg, &stamp),
        Command::ModelN1 => commands::cmd_model_n1(cfg, &stamp),
        Command::FormFactor => commands::cmd_form_factor(cfg, &stamp),
    }
}

/// Loads the config, runs the command and writes its files into `out`.
/// Returns the exit code and the report printed to stdout.
pub fn run(command: Command, config: &Path, out: &Path, overrides: Overrides) -> (u8, Value) {
    let mut cfg = match RunConfig::load(config) {
        Ok(c) => c,
        Err(e) => return fail(command, out, None, &e),
    };
    cfg.apply(overrides);
    match execute(command, &cfg) {
        Ok(outcome) => {
            for a in &outcome.artifacts {
                if let Err(e) = write_atomic(out, a) {
                    return (e.code(), error_report(command, Some(&cfg), &e));
                }
            }
            (if outcome.success { 0 } else { 1 }, outcome.report)
        }
        Err(e) => fail(command, out, Some(&cfg), &e),
    }
}

fn error_report(command: Command, cfg: Option<&RunConfig>, e: &CliError) -> Value {
    json!({
        "tool": output::TOOL,
        "version": output::VERSION,
        "config_sha256": cfg.map(RunConfig::sha256),
        "command": command.name(),
        "error": { "kind": e.kind(), "message": e.to_string() },
    })
}

fn fail(command: Command, out: &Path, cfg: Option<&RunConfig>, e: &CliError) -> (u8, Value) {
    let report = error_report(command, cfg, e);
    // best effort: the error is still printed if the directory is unusable
    let _ = write_atomic(out, &json_artifact(&format!("{}.json", command.file_stem()), &report));
    (e.code(), report)
}
