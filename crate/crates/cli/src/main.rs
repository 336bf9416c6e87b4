use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use freeprecode_cli::checkpoint::Checkpoint;
use freeprecode_cli::commands::{self, Metric, Overrides, DEFAULT_SAMPLES};
use freeprecode_cli::config::Mode;
use freeprecode_cli::{CliError, Result};

#[derive(Parser)]
#[command(name = "freeprecode", version, about = "Model-free linear MIMO precoder training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a precoder and receiver; writes checkpoint.txt and history.csv.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
        /// model_free, model_aware or mac.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Evaluate a checkpoint over an SNR grid; writes a results CSV.
    Eval {
        checkpoint: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated SNR grid in dB (default: the training SNR).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        snr_db: Option<Vec<f64>>,
        /// Comma-separated subset of mi_model_free, mi_no_precoder,
        /// mi_diag_baseline, ber_map, ber_receiver (default: all).
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
        /// Noise draws per MI estimate, frames per BER estimate.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train and compare all methods over an SNR grid; writes a sweep CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        snr_db: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a summary of a checkpoint.
    InspectCheckpoint { checkpoint: PathBuf },
}

fn parse_mode(mode: Option<String>) -> Result<Option<Mode>> {
    mode.map(|m| {
        Mode::parse(&m).ok_or_else(|| CliError::field("mode", format!("unknown mode `{m}` (model_free, model_aware, mac)")))
    })
    .transpose()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            config,
            out,
            seed,
            snr_db,
            mode,
        } => {
            let overrides = Overrides {
                seed,
                snr_db: snr_db.map(|s| vec![s]),
                mode: parse_mode(mode)?,
            };
            let path = commands::cmd_train(&config, &out, &overrides)?;
            println!("wrote {}", path.display());
        }
        Command::Eval {
            checkpoint,
            out,
            snr_db,
            metrics,
            samples,
            seed,
        } => {
            let metrics = match metrics {
                Some(m) => m.iter().map(|s| Metric::parse(s)).collect::<Result<Vec<_>>>()?,
                None => Metric::ALL.to_vec(),
            };
            let rows = commands::cmd_eval(&checkpoint, &out, snr_db.as_deref(), &metrics, samples, seed)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Sweep {
            config,
            out,
            snr_db,
            samples,
            seed,
        } => {
            let overrides = Overrides {
                seed,
                snr_db,
                mode: None,
            };
            let rows = commands::cmd_sweep(&config, &out, &overrides, samples)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::InspectCheckpoint { checkpoint } => {
            print!("{}", commands::inspect(&Checkpoint::load(&checkpoint)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
