mod args;
mod commands;
mod config;

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ColorChoice, CommandFactory, FromArgMatches};
use thiserror::Error;

use args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag combinations or missing inputs: exit status 2.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] panelrank::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

macro_rules! via_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

via_core!(
    panelrank::model::ModelError,
    panelrank::ingest::IngestError,
    panelrank::delphi::DelphiError,
    panelrank::swara::SwaraError,
    panelrank::concordance::ConcordanceError,
    panelrank::sensitivity::SensitivityError,
    panelrank::report::ReportError
);

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Stderr styling, off when `PANELRANK_NO_COLOR` is set or stderr is not a terminal.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Self {
        let disabled = std::env::var_os("PANELRANK_NO_COLOR").is_some();
        Self {
            color: !disabled && std::io::stderr().is_terminal(),
        }
    }

    fn tag(&self, text: &str, ansi: &str) -> String {
        if self.color {
            format!("\x1b[{ansi}m{text}\x1b[0m")
        } else {
            text.to_owned()
        }
    }

    pub fn warn(&self, message: &str) {
        eprintln!("{}: {message}", self.tag("warning", "1;33"));
    }

    fn error(&self, message: &str) {
        eprintln!("{}: {message}", self.tag("error", "1;31"));
    }
}

/// Writes to stdout, or to `path` through a temporary file renamed on success.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(io(Path::new("<stdout>")));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io(path))?;
    tmp.write_all(text.as_bytes()).map_err(io(path))?;
    tmp.persist(path).map_err(|e| io(path)(e.error))?;
    Ok(())
}

fn main() -> ExitCode {
    let style = Style::detect();
    let mut command = Cli::command();
    if !style.color {
        command = command.color(ColorChoice::Never);
    }
    let cli = command
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m))
        .unwrap_or_else(|e| e.exit());
    match commands::run(cli, style) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            style.error(&e.to_string());
            ExitCode::from(e.exit_code())
        }
    }
}
