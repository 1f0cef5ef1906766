use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use qrev::experiment::{self, RunOptions, RunSummary};
use qrev::{CliError, LoadedConfig};

/// Regularized backward solves for terminal-value parabolic problems.
#[derive(Debug, Parser)]
#[command(name = "qrev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `outputs.dir`.
    #[arg(long, global = true, env = "QUASIREV_OUT")]
    out: Option<PathBuf>,
    /// Noise seed; overrides `outputs.seed` (first seed of a sweep).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for independent runs.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the forward problem and write the terminal field.
    Forward,
    /// Reconstruct earlier states from noisy terminal data.
    Invert {
        /// Clean terminal data; manufactured from the configuration when absent.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Invert over every configured seed and noise level.
    Sweep {
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Solve the t^ε rule for each noise level.
    Tstar,
    /// Weighted-energy inequality check over a range of m.
    Carleman,
    /// Approximation numbers of the Gevrey embedding.
    ApproxNumbers,
}

fn run(cli: &Cli) -> Result<RunSummary, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = LoadedConfig::from_path(path)?;
    let data = match &cli.command {
        Command::Invert { data } | Command::Sweep { data } => data.clone(),
        _ => None,
    };
    let opts = RunOptions {
        out: cli.out.clone(),
        seed: cli.seed,
        data,
    };
    match cli.command {
        Command::Forward => experiment::run_forward(&mut cfg, &opts),
        Command::Invert { .. } => experiment::run_invert(&mut cfg, &opts),
        Command::Sweep { .. } => experiment::run_sweep(&mut cfg, &opts),
        Command::Tstar => experiment::run_tstar(&mut cfg, &opts),
        Command::Carleman => experiment::run_carleman(&mut cfg, &opts),
        Command::ApproxNumbers => experiment::run_approx(&mut cfg, &opts),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", summary.out_dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            eprintln!("qrev: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
