use std::process::ExitCode;

use clap::Parser;
use npspec::{run, Args, CliResult, RunConfig};

fn main() -> ExitCode {
    match go() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("npspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn go() -> CliResult<()> {
    let cfg = RunConfig::from_args(Args::parse())?;
    run(&cfg)?.emit()
}
