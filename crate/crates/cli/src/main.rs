mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Format, RunConfig};
use run::{execute, Options, EXIT_INPUT};

/// Arithmetic Chern connections on GL_n: lifts, globalization and curvature.
#[derive(Debug, Parser)]
#[command(name = "arithcurv", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report destination (default: the config's output path, else stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Allow one precision escalation (K + 8) and one degree escalation (D + 1).
    #[arg(long)]
    escalate: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("arithcurv: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_INPUT, &format!("cannot read {}: {e}", cli.config.display())),
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INPUT, &e),
    };
    let validated = match cfg.validate() {
        Ok(v) => v,
        Err(e) => return fail(EXIT_INPUT, &e),
    };
    let opts = Options {
        format: cli.format.or(cfg.output.format).unwrap_or_default(),
        escalate: cli.escalate,
        jobs: cli.jobs.max(1),
    };
    let outcome = match execute(&validated, &opts) {
        Ok(o) => o,
        Err((code, msg)) => return fail(code, &msg),
    };
    let target = cli.output.or(cfg.output.path.map(PathBuf::from));
    match target {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &outcome.report) {
                return fail(EXIT_INPUT, &format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{}", outcome.report),
    }
    ExitCode::from(outcome.exit)
}
