use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fockgabor_cli::config::RunConfig;
use fockgabor_cli::report::Format;
use fockgabor_cli::run::{run, Options, EXIT_ERROR};
use fockgabor_cli::suites::Command;

/// Numerical verification suites for kernel systems in the Fock space.
#[derive(Parser, Debug)]
#[command(name = "fockgabor", version)]
struct Cli {
    /// Suite to run.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Flat TOML configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the reports.
    #[arg(long, default_value = "reports")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// No progress on stderr.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(command) = cli.command else {
        eprintln!("error: no suite selected");
        return ExitCode::from(EXIT_ERROR);
    };
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| format!("{}: {e}", path.display())),
        None => Err("--config <file> is required".to_string()),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let opts = Options { out: cli.out, format: cli.format, quiet: cli.quiet };
    match run(command, &cfg, &opts) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: cannot write reports to {}: {e}", opts.out.display());
            ExitCode::from(EXIT_ERROR)
        }
    }
}
