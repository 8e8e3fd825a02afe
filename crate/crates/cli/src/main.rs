//! `lchi`: certifications, sweeps and audits with JSON or CSV reports.
//!
//! Exit status: 0 when every certification or check passes, 1 when a report
//! was produced but something failed, 2 when no report could be produced
//! (bad flags, bad config, invalid parameters, unwritable output).

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{merge, Cli};

fn run(cli: Cli) -> Result<bool, String> {
    let (common, command) = merge(cli)?;
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    if let Some(p) = &common.output {
        output::check_writable(p)?;
    }
    let name = command.name();
    let generated_at = common.timestamp.then(output::timestamp);
    let outcome = commands::run(command, &common)?;
    let bytes = output::render(name, &outcome, common.format, generated_at)?;
    match &common.output {
        Some(p) => output::write_atomic(p, &bytes).map_err(|e| format!("writing {}: {e}", p.display()))?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?,
    }
    eprintln!("[{}] {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.summary);
    Ok(outcome.pass)
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
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("lchi: {msg}");
            ExitCode::from(2)
        }
    }
}
