//! Argument parsing and dispatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Globals};

#[derive(Debug, Parser)]
#[command(name = "srir", version, about = "Spatial room impulse response analysis, binaural resynthesis and evaluation")]
pub struct Cli {
    #[command(flatten)]
    pub globals: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON config for the command.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the config's seed (default 0).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Overrides the config's output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub threads: usize,
    /// Also write trajectories and virtual loudspeaker signals.
    #[arg(long, global = true)]
    pub dump_intermediates: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render image-source scenes for every receiver.
    Simulate,
    /// Run analysis and synthesis conditions on recorded or simulated inputs.
    Render,
    /// Compare system BRIRs against a reference.
    Compare,
    /// Metric report of one BRIR.
    Metrics {
        /// BRIR WAV; overrides the config's `brir`.
        brir: Option<PathBuf>,
    },
    /// Exponential sine sweep measurement.
    Ess {
        #[command(subcommand)]
        action: EssAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum EssAction {
    /// Write a sweep and its inverse filter.
    Generate,
    /// Recover impulse responses from a recorded sweep.
    Deconvolve,
}

impl From<&GlobalArgs> for Globals {
    fn from(a: &GlobalArgs) -> Self {
        Globals {
            config: a.config.clone(),
            seed: a.seed,
            output: a.output.clone(),
            threads: a.threads,
            dump_intermediates: a.dump_intermediates,
        }
    }
}

pub fn run(cli: &Cli) -> crate::Result<()> {
    let g = Globals::from(&cli.globals);
    match &cli.command {
        Command::Simulate => commands::cmd_simulate(&g),
        Command::Render => commands::cmd_render(&g),
        Command::Compare => commands::cmd_compare(&g),
        Command::Metrics { brir } => commands::cmd_metrics(&g, brir.as_deref()),
        Command::Ess { action: EssAction::Generate } => commands::cmd_ess_generate(&g),
        Command::Ess { action: EssAction::Deconvolve } => commands::cmd_ess_deconvolve(&g),
    }
}

/// Parses, runs and maps the outcome to 0, 1 (runtime failure) or 2
/// (configuration error, including bad arguments).
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
