use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nnsp::commands::{self, CertifyArgs, ExperimentArgs, GenerateArgs, RecoverArgs, SampleArgs};
use nnsp::exit;

/// Recover clustered graph signals from sampled nodes and certify sampling
/// sets by network flows.
#[derive(Debug, Parser)]
#[command(name = "nnsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the nullspace property of a sampling set (exit 0 certified, 2 refuted).
    Certify(CertifyArgs),
    /// Recover a signal from observations (exit 0 converged, 3 iteration limit).
    Recover(RecoverArgs),
    /// Build a sampling set.
    Sample(SampleArgs),
    /// Run a chain or roadmap experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Write benchmark instances as CSV files.
    Generate(GenerateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::INPUT_ERROR
            } else {
                exit::OK
            });
        }
    };
    let result = match &cli.command {
        Command::Certify(a) => commands::certify(a),
        Command::Recover(a) => commands::recover_cmd(a),
        Command::Sample(a) => commands::sample(a),
        Command::Experiment(a) => commands::experiment_cmd(a),
        Command::Generate(a) => commands::generate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::INPUT_ERROR)
        }
    }
}
