mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::CliError;

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.global.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("turanlab: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = commands::run(&cli.command, &cli.global).and_then(|out| {
        emit(&cli, &out.text)?;
        match out.failure {
            Some(msg) => Err(CliError::Check(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("turanlab: {e}");
            e.exit_code()
        }
    }
}
