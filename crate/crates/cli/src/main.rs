//! `vfi`: command-line front end.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 usage or validation error,
//! 3 input without enough motion to estimate timing. The last case also
//! prints a JSON error object on stdout.

mod args;
mod cmd;
mod config;
mod error;
mod layout;
mod report;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use config::Settings;
use error::{CliError, Result};

fn run(cli: &Cli) -> Result<()> {
    let settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    match cli.threads.or(settings.usize("runtime.threads")?) {
        Some(0) => return Err(CliError::usage("--threads must be at least 1")),
        Some(n) => pool = pool.num_threads(n),
        None => {}
    }
    let pool = pool.build().map_err(|e| CliError::usage(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Synth(a) => cmd::synth::run(a, &settings),
        Command::Scene(a) => cmd::scene::run(a, &settings),
        Command::Estimate(a) => cmd::estimate::run(a, &settings),
        Command::Interp(a) => cmd::interp::run(a, &settings),
        Command::Eval(a) => cmd::eval::run(a, &settings),
        Command::Flowviz(a) => cmd::flowviz::run(a, &settings),
    })
}

fn report_failure(err: &CliError) {
    eprintln!("error: {err}");
    if let CliError::Core(e) = err {
        if let vfi_core::Error::InsufficientMotion { qualified, required } = e.root() {
            let body = json!({
                "schema": report::SCHEMA,
                "error": "insufficient_motion",
                "message": err.to_string(),
                "qualified": qualified,
                "required": required,
            });
            report::print_line(&report::to_json(&body));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_failure(&e);
            ExitCode::from(e.exit_code())
        }
    }
}
