use std::process::ExitCode;

use clap::Parser;
use cochain_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli);
    if let Some(path) = &cli.common.out {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.common.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if let Some(err) = report.result.get("error").and_then(|e| e.as_str()) {
        eprintln!("error: {err}");
    }
    ExitCode::from(report.exit_code as u8)
}
