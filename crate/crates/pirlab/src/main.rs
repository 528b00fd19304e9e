use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use pirlab::cli::{cmd_capacity, cmd_run, cmd_verify, Cli, CliError, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out_path) = match &cli.command {
        Command::Run(args) => (cmd_run(args), args.out.clone()),
        Command::Verify(args) => (cmd_verify(args), args.out.clone()),
        Command::Capacity(args) => (cmd_capacity(args), args.out.clone()),
    };
    match result {
        Ok(output) => match emit(&output, out_path.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                let _ = writeln!(std::io::stderr(), "pirlab: {e}");
                ExitCode::from(1)
            }
        },
        Err(CliError::VerificationFailed(report)) => {
            // The report goes wherever successful output would have gone;
            // the one-line status goes to stderr.
            let _ = emit(&report, out_path.as_deref());
            let _ = writeln!(std::io::stderr(), "pirlab: verification failed");
            ExitCode::from(1)
        }
        Err(err) => {
            let _ = writeln!(std::io::stderr(), "pirlab: {err}");
            ExitCode::from(err.exit_status() as u8)
        }
    }
}

fn emit(output: &str, out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, output),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}
