use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use widthlab_cli::{exit_code, init_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(outcome) => {
            let status = if outcome.passed { "PASS" } else { "FAIL" };
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{status} {}", cli.command.name());
            for line in &outcome.summary {
                let _ = writeln!(out, "  {line}");
            }
            for f in &outcome.files {
                let _ = writeln!(out, "  wrote {}", f.display());
            }
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
