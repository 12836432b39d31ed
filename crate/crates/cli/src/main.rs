//! `sphmax`: command-line front end.
//!
//! Every command prints one report on stdout. JSON reports have the shape
//! `{"tool", "version", "command", "config", "result"}`; the thread count is
//! left out of `config` because it never changes the result. Failures print
//! `{"error": {"kind", "message"}}` on stderr and exit nonzero.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Map, Value};
use spherical_maximal::{Exec, Limits, Settings};

use args::{Cli, Format};

pub enum CliError {
    Core(spherical_maximal::Error),
    Config(String),
    Io(String),
}

impl From<spherical_maximal::Error> for CliError {
    fn from(e: spherical_maximal::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn record(&self) -> Value {
        let (kind, message) = match self {
            CliError::Core(e) => (e.kind(), e.to_string()),
            CliError::Config(m) => ("InvalidConfig", m.clone()),
            CliError::Io(m) => ("IoError", m.clone()),
        };
        json!({"error": {"kind": kind, "message": message}})
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn fail(err: CliError) -> ExitCode {
    eprintln!("{}", err.record());
    ExitCode::from(err.exit_code())
}

fn config_of(cli: &Cli) -> Value {
    let mut config = Map::new();
    if let Value::Object(m) = serde_json::to_value(&cli.command).expect("args serialize") {
        config.extend(m);
    }
    if let Value::Object(m) = serde_json::to_value(&cli.common).expect("args serialize") {
        config.extend(m);
    }
    Value::Object(config)
}

fn configure_threads(threads: Option<u32>) -> Result<(), CliError> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            return fail(CliError::Config(message.trim().to_string()));
        }
    };
    if let Err(e) = configure_threads(cli.common.threads) {
        return fail(e);
    }
    let settings = Settings {
        limits: Limits {
            max_points: cli.common.cap_points,
            max_torus_cells: cli.common.cap_cells,
            max_sieve_cells: cli.common.cap_sieve,
            max_work: cli.common.budget,
        },
        exec: if cli.common.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        },
    };

    let output = match commands::run(&cli.command, &settings) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let text = match cli.common.format {
        Format::Csv => output.csv,
        Format::Json => {
            let report = json!({
                "tool": "sphmax",
                "version": env!("CARGO_PKG_VERSION"),
                "command": cli.command.name(),
                "config": config_of(&cli),
                "result": output.json,
            });
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        return fail(CliError::Io(format!("stdout: {e}")));
    }
    ExitCode::SUCCESS
}
