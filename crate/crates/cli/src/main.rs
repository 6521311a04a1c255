use std::io;
use std::process::ExitCode;

use clap::Parser;
use ragcheck_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let status = run(cli, &mut io::stdout(), &mut io::stderr());
    ExitCode::from(status.code())
}
