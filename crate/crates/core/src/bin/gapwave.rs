use std::process::ExitCode;

use clap::Parser;
use gapwave::cli::{execute, exit_code, init_threads, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let result = cli.resolve().and_then(|c| execute(&c));
    match &result {
        Ok(m) => println!("{}", serde_json::to_string_pretty(&m.summary).unwrap_or_default()),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result))
}
