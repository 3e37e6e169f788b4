use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pointform::{run, Command, Overrides};

#[derive(Parser)]
#[command(name = "pointform", version, about = "Point-form four-momentum spectra and checks")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    nmax: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Check the operator algebra, vertices and commutators.
    Verify,
    /// Lowest eigenvalues of the mass operator.
    Spectrum,
    /// Coupling at which the lowest level vanishes.
    SolveAlpha,
    /// One-mode model by series and by diagonalization.
    ModelN1,
    /// Tabulate the vertex form factor.
    FormFactor,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Some(config) = cli.config else {
        eprintln!("error: --config is required");
        return ExitCode::from(2);
    };
    let command = match cli.command {
        Sub::Verify => Command::Verify,
        Sub::Spectrum => Command::Spectrum,
        Sub::SolveAlpha => Command::SolveAlpha,
        Sub::ModelN1 => Command::ModelN1,
        Sub::FormFactor => Command::FormFactor,
    };
    let overrides = Overrides {
        seed: cli.seed,
        tolerance: cli.tolerance,
        n_max: cli.nmax,
    };
    let (code, report) = run(command, &config, &cli.out, overrides);
    match serde_json::to_string_pretty(&report) {
        Ok(s) => println!("{s}"),
        Err(e) => eprintln!("error: {e}"),
    }
    if let Some(err) = report.get("error") {
        eprintln!("error: {}", err["message"].as_str().unwrap_or_default());
    }
    ExitCode::from(code)
}
