use std::process::ExitCode;

use clap::Parser;
use contact_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match contact_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("contact-mf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
