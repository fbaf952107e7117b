use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ymlattice_cli::{run_command, CliError, Command, RunConfig};

/// Discrete SU(2) Yang–Mills calculus on a 4-D block or a glued 4-sphere.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; defaults apply to omitted fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path, overriding the configuration.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: &Args) -> Result<i32, CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(output) = &args.output {
        config.output = Some(output.clone());
    }
    let outcome = run_command(args.command, &config)?;
    outcome.write(&config)?;
    print!("{}", outcome.report.summary());
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = run(&args).unwrap_or_else(|e| {
        eprintln!("ymlattice: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
