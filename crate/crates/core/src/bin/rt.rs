use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rt_core::io::{self, Command, RunConfig};

/// Rayleigh-Taylor dispersion analysis and modal simulation.
#[derive(Parser)]
#[command(name = "rt", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "rt-out")]
    out: PathBuf,
    /// Overrides the white-noise seed of `simulate`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("rt: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = RunConfig::load(&cli.config).and_then(|cfg| io::run_command(cli.command, &cfg, &cli.out, cli.seed));
    match result {
        Ok(files) => {
            eprintln!("rt: wrote {} file(s) and manifest.json to {}", files.len(), cli.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rt: {e}");
            ExitCode::from(io::exit_code(&e) as u8)
        }
    }
}
