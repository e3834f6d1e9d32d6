//! Front end for `ab-core`: reads a run configuration, executes one command
//! and renders the result as CSV with a provenance preamble.

pub mod config;
pub mod execute;

use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

pub use config::{parse_config, Command, RunConfig};
pub use execute::{execute, Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid value for `{field}`: {constraint}")]
    Validation { field: String, constraint: String },

    #[error(transparent)]
    Core(#[from] ab_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn render_csv(command: Command, config_text: &str, table: &Table) -> String {
    let name = clap::ValueEnum::to_possible_value(&command).map(|v| v.get_name().to_string());
    let mut out = String::new();
    let _ = writeln!(out, "# ab-forces {}", name.unwrap_or_default());
    let _ = writeln!(out, "# config sha256 {}", config_hash(config_text));
    let _ = writeln!(out, "# ab-core {} ab-forces {}", ab_core::VERSION, env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# n_max {}", table.n_max);
    for note in &table.notes {
        let _ = writeln!(out, "# {note}");
    }
    let _ = writeln!(out, "{}", table.header.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Writes through a sibling temporary file so a failed run leaves nothing behind.
pub fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    if let Err(e) = std::fs::write(&tmp, contents).and_then(|_| std::fs::rename(&tmp, path)) {
        let _ = std::fs::remove_file(&tmp);
        return Err(io(e));
    }
    Ok(())
}

/// Worker count from `AB_FORCES_THREADS`; zero or unset leaves rayon's default.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("AB_FORCES_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| CliError::Validation {
        field: "AB_FORCES_THREADS".into(),
        constraint: format!("must be a nonnegative integer, got \"{raw}\""),
    })?;
    if n > 0 {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
