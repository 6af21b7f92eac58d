//! `tailcert`: certify the tail behavior of push-forward generative models
//! and audit samples against those certificates.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 certificate
//! violation verdict (so CI can gate on tail soundness).

use clap::error::ErrorKind;
use clap::Parser;

mod cli;
mod commands;
mod grammar;
mod manifest;

/// Errors carrying their process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

pub fn run(argv: Vec<String>) -> i32 {
    let parsed = match cli::Cli::try_parse_from(&argv) {
        Ok(p) => p,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let result = match &parsed.command {
        cli::Command::Certify(args) => commands::certify(args, &argv),
        cli::Command::CertifyDiffusion(args) => commands::certify_diffusion_cmd(args, &argv),
        cli::Command::Sample(args) => commands::sample(args, &argv),
        cli::Command::Push(args) => commands::push(args, &argv),
        cli::Command::Audit(args) => commands::audit(args, &argv),
        cli::Command::IngestReturns(args) => commands::ingest(args, &argv),
        cli::Command::GenNetwork(args) => commands::gen_network(args, &argv),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `tailcert --help` for the command grammar");
            }
            e.exit_code()
        }
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(run(argv));
}
