use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use firing_graph_cli::{run, CliError, ExperimentConfig, Overrides};

/// Runs a seeded firing-graph experiment. Flags override values from `--config`.
#[derive(Parser)]
#[command(name = "fgraph", version)]
struct Cli {
    /// File of `key=value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let resolved = match &cli.config {
        Some(path) => Overrides::from_file(path).map(|base| base.merge(cli.overrides)),
        None => Ok(cli.overrides),
    }
    .and_then(ExperimentConfig::resolve);
    let cfg = match resolved {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            print!("{}", report.summary);
            if report.failures > 0 {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
