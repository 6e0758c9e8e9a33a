use std::io::{self, Read, Write};
use std::process::ExitCode;

use abloc_cli::{execute, Cli, Command};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdin = String::new();
    if matches!(cli.command, Command::Batch { .. }) {
        if let Err(e) = io::stdin().read_to_string(&mut stdin) {
            eprintln!("error: cannot read standard input: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = execute(&cli, &stdin);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = io::stdout().flush();
    ExitCode::from(outcome.code as u8)
}
