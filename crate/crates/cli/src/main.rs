use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use worldsync::{exit, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli.command, &mut stdout) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("worldsync: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
