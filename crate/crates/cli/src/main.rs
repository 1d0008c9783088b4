//! Batch front end for the workbench library.
//!
//! One invocation runs one job described by a plain-text config and writes
//! one artifact, atomically, in JSON or CSV. Reruns with the same config
//! and seed produce byte-identical output. Exit codes: 0 on success, 2 for
//! bad input (config syntax, missing or extra fields, invalid parameters),
//! 3 when a computation fails an internal consistency check.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cotorlab_cli::{artifact, config, jobs, CliError};

#[derive(Parser)]
#[command(
    name = "cotorlab",
    version,
    about = "Runs one workbench job from a key = value config and writes a deterministic JSON or CSV artifact"
)]
struct Cli {
    /// Plain-text config: a `job = <name>` line plus integer parameters,
    /// one `key = value` per line.
    #[arg(long)]
    config: PathBuf,

    /// Output artifact path; written atomically via a sibling temp file.
    #[arg(long)]
    out: PathBuf,

    /// Artifact format: full JSON artifact or bare CSV dimension table.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,

    /// Seed for the randomized jobs; overrides a `seed` line in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = config::parse_config(&cli.config)?;
    let art = jobs::run_job(&cfg, cli.seed)?;
    let bytes = match cli.format.as_str() {
        "json" => art.to_json().into_bytes(),
        "csv" => art.to_csv().into_bytes(),
        other => {
            return Err(CliError::validation(format!("unknown format {other:?}")));
        }
    };
    artifact::write_atomic(&cli.out, &bytes)?;
    Ok(format!("{} artifact written to {}", cfg.job, cli.out.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}
