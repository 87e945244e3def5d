use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use lambda_g_cli::{run, Cli, CliConfig};

fn main() -> ExitCode {
    let cfg = CliConfig::from(Cli::parse());
    let mut out = io::stdout().lock();
    let code = run(&cfg, &mut out, &mut io::stderr());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
