mod config;
mod run;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Format, RunConfig};
use run::{execute, render, UsageError};

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let config = match (&cli.config, &cli.command) {
        (Some(path), None) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
            };
            let mut cfg: RunConfig = match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(e) => return usage(format!("invalid config {}: {e}", path.display())),
            };
            if let Some(f) = cli.format {
                cfg.format = f;
            }
            if cli.output.is_some() {
                cfg.output = cli.output.clone();
            }
            cfg
        }
        (None, Some(cmd)) => RunConfig {
            format: cli.format.unwrap_or(Format::Json),
            output: cli.output.clone(),
            task: cmd.resolve(),
        },
        (Some(_), Some(_)) => return usage("--config cannot be combined with a subcommand"),
        (None, None) => return usage("a subcommand or --config is required (see --help)"),
    };

    if let Some(t) = cli.threads {
        if t == 0 {
            return usage("--threads must be positive");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return usage(e);
        }
    }

    let report = match execute(&config) {
        Ok(r) => r,
        Err(UsageError(msg)) => return usage(msg),
    };
    let body = match render(&config, &report) {
        Ok(b) => b,
        Err(UsageError(msg)) => return usage(msg),
    };
    let written = match &config.output {
        Some(path) => fs::write(path, &body),
        None => std::io::stdout().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
