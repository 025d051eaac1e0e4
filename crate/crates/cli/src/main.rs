use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use peakdomain::{list_experiments, run, Invocation, EXIT_CONFIG, WORKERS_ENV};

#[derive(Parser, Debug)]
#[command(name = "peakdomain", version, about = "Finite-peak cocycle experiments")]
#[command(after_help = list_experiments())]
struct Cli {
    /// Experiment name; may also be given as `experiment = …` in the config
    experiment: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config else {
        print!("{}", list_experiments());
        return if cli.experiment.is_none() {
            ExitCode::SUCCESS
        } else {
            eprintln!("config error: --config <file> is required");
            ExitCode::from(EXIT_CONFIG as u8)
        };
    };
    let inv = Invocation {
        experiment: cli.experiment,
        config,
        seed: cli.seed,
        workers: cli.workers,
        out: cli.out,
        env_workers: std::env::var(WORKERS_ENV).ok(),
    };
    let code = run(&inv, &mut std::io::stderr());
    ExitCode::from(code as u8)
}
