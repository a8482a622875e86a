mod bench;
mod cluster;
mod convert;
mod generate;
mod io;
mod options;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "fastpam", version, about = "k-medoids clustering with PAM, FastPAM and sampling variants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one data set and write the result as JSON.
    Cluster(cluster::ClusterArgs),
    /// Run an experiment matrix described by a JSON spec; writes records.csv and summary.csv.
    Bench(bench::BenchArgs),
    /// Write a seeded Gaussian mixture as CSV.
    Generate(generate::GenerateArgs),
    /// Convert vectors (or a square CSV matrix) to the triangular matrix format.
    ConvertMatrix(convert::ConvertArgs),
}

/// Why a command stopped. Usage problems exit with 2, everything else with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(String),
}

impl From<fastpam::Error> for Failure {
    fn from(e: fastpam::Error) -> Self {
        match e {
            fastpam::Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(args) => cluster::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Generate(args) => generate::run(args),
        Command::ConvertMatrix(args) => convert::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
