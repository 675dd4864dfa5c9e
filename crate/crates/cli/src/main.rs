use std::process::ExitCode;

use clap::Parser;
use urnpde_cli::format::{emit, render};
use urnpde_cli::record::Status;
use urnpde_cli::{run, Cli};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let record = match run(&cli) {
        Ok(record) => record,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let written = render(&record, cli.format).and_then(|bytes| emit(&bytes, cli.out.as_deref()));
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_FAIL);
    }
    match record.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Fail => ExitCode::from(EXIT_FAIL),
    }
}
