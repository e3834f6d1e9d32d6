use ab_forces::{configure_threads, execute, parse_config, render_csv, write_output, CliError, Command};
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

/// Forces on an electron beam scattered by a flux-carrying cylinder.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    /// What to compute.
    #[arg(value_enum)]
    command: Command,
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; overrides `[output] path`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), CliError> {
    configure_threads()?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|source| CliError::Io { path: args.config.display().to_string(), source })?;
    let cfg = parse_config(args.command, &text)?;
    let table = execute(&cfg)?;
    let csv = render_csv(args.command, &text, &table);
    match args.out.or(cfg.output) {
        Some(path) => write_output(&path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ab-forces: {e}");
            ExitCode::FAILURE
        }
    }
}
