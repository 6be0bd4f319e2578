use std::path::PathBuf;
use std::process::ExitCode;

use bfgd_harness::{bench_svd_vs_matmul, run_experiment, BenchRow, ExperimentConfig, HarnessError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bfgd", version, about = "Run bi-factored gradient descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the trace, factors and report files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Time a truncated SVD against two matrix products.
    BenchSvd {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Run {
            config,
            out_dir,
            seed,
            quiet,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|source| HarnessError::Io {
                path: config.clone(),
                source,
            })?;
            let mut cfg = ExperimentConfig::from_json(&text).map_err(|source| HarnessError::Json {
                path: config.clone(),
                source,
            })?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = run_experiment(&cfg, &out_dir, quiet)?;
            Ok(if report.diverged() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::BenchSvd {
            m,
            r,
            trials,
            seed,
            out,
        } => {
            let row = bench_svd_vs_matmul(m, r, trials, seed)?;
            let csv = format!("{}\n{}\n", BenchRow::CSV_HEADER, row.to_csv_line());
            match out {
                Some(path) => std::fs::write(&path, csv).map_err(|source| HarnessError::Io { path, source })?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
