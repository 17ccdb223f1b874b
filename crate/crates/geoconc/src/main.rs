use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use geoconc::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let text = outcome.render(cli.json);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    ExitCode::from(outcome.code as u8)
}
