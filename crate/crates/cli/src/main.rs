//! `doodler`: train an autoencoder, fit its error laws, and detect
//! out-of-distribution samples, pixels and streams.

mod artifacts;
mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{DetectArgs, EvalArgs, FitArgs, SegmentArgs, StreamArgs, TrainArgs};
use config::Config;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "doodler", version, about = "Out-of-distribution detection from autoencoder reconstruction error")]
#[command(after_help = "Settings come from flags, then the command's [section] of --config, then defaults.\n\
Seeds fall back to the DOODLER_SEED environment variable.\n\
Exit codes: 0 success, 1 usage or config error, 2 data error, 3 numeric failure.")]
struct Cli {
    /// INI file with one [section] per command
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train the autoencoder and write the model and loss log
    Train(TrainArgs),
    /// Fit error laws on ID (and optionally OOD) data
    Fit(FitArgs),
    /// Classify every image of a dataset as ID or OOD
    Detect(DetectArgs),
    /// Write a per-pixel OOD heatmap of one image
    Segment(SegmentArgs),
    /// Test whether a stream of images is in-distribution
    Stream(StreamArgs),
    /// Score OOD test sets and noise baselines against an ID test set
    Eval(EvalArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Train(a) => commands::run_train(&cfg, a),
        Command::Fit(a) => commands::run_fit(&cfg, a),
        Command::Detect(a) => commands::run_detect(&cfg, a),
        Command::Segment(a) => commands::run_segment(&cfg, a),
        Command::Stream(a) => commands::run_stream(&cfg, a),
        Command::Eval(a) => commands::run_eval(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("doodler: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
