use std::process::ExitCode;

use clap::Parser;
use fdspc_cli::{run, validate, Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version are not errors; usage errors share code 1 with IO failures
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let Command::Run(cfg) = cli.command;
    if cfg.validate_only {
        let diags = validate(&cfg);
        for d in &diags {
            println!("{d}");
        }
        return if diags.iter().any(|d| d.is_error()) {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        };
    }
    match run(&cfg) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
