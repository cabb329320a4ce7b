//! Command-line front end for the `cubicmf` library.
//!
//! Exit status: 0 success, 2 usage error, 3 regime error, 4 I/O error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::io::Write;

pub use config::{
    parse_config, parse_range, parse_window, GridRange, RunConfig, UsageError, Window,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Regime(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Regime(_) => EXIT_REGIME,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Regime(m) | Failure::Io(m) => m,
        }
    }
}

impl From<cubicmf::Error> for Failure {
    fn from(e: cubicmf::Error) -> Self {
        use cubicmf::Error as E;
        match e {
            E::Domain { .. } | E::Resource { .. } => Failure::Usage(e.to_string()),
            E::Regime { .. }
            | E::EmptyRestriction { .. }
            | E::Degenerate { .. }
            | E::SaturatedRoot { .. }
            | E::RootOrdering { .. }
            | E::Fit(_) => Failure::Regime(e.to_string()),
        }
    }
}

/// Runs the configured command and writes every table.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Failure::Io(format!("cannot start worker pool: {e}")))?;
    let outputs = pool.install(|| commands::execute(config))?;
    let name = config.command.name();
    for out in outputs {
        let text = out.table.render(config.format, name);
        match out.path.as_ref().or(config.out.as_ref()) {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?,
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Io(format!("cannot write standard output: {e}")))?,
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = match parse_config(args) {
        Ok(config) => execute(&config, stdout),
        Err(UsageError::Info(text)) => {
            let _ = stdout.write_all(text.as_bytes());
            return EXIT_OK;
        }
        Err(UsageError::Invalid(text)) => Err(Failure::Usage(text)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let msg = f.message();
            let _ = writeln!(stderr, "{}", msg.trim_end());
            f.exit_code()
        }
    }
}
