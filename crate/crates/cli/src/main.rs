use std::process::ExitCode;

use clap::Parser;
use dmbc_cli::args::Cli;

fn main() -> ExitCode {
    let result = Cli::parse().into_run_config().and_then(|rc| dmbc_cli::run(&rc));
    match result {
        Ok(out) => {
            print!("{}", out.text);
            match out.failure {
                Some(msg) => {
                    eprintln!("certification failed: {msg}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
