//! Batch driver for the peakdomain experiments.
//!
//! `peakdomain <experiment> --config <file> [--seed S] [--workers W] [--out DIR]`
//! reads a `key = value` config, validates every parameter, runs the
//! experiment on a fixed-size worker pool and writes CSV tables plus a
//! `manifest.txt`. Exit codes: 0 all checks pass, 1 a check failed, 2 bad
//! config or usage, 3 internal or numeric error.

pub mod config;
mod experiments;
pub mod report;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub use config::{ConfigError, ConfigFile};
pub use experiments::{Experiment, Plan};
pub use report::{Check, Outcome, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const WORKERS_ENV: &str = "PEAKDOMAIN_WORKERS";

/// One command-line invocation. `env_workers` carries the value of
/// [`WORKERS_ENV`], if set.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub experiment: Option<String>,
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub env_workers: Option<String>,
}

/// Everything needed to run, checked before any computation.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub experiment: Experiment,
    pub plan: Plan,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub config: ConfigFile,
}

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Internal(String),
}

#[derive(Debug)]
pub struct Executed {
    pub prepared: Prepared,
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
}

pub fn list_experiments() -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "usage: peakdomain <experiment> --config <file> [--seed S] [--workers W] [--out DIR]\n"
    );
    let _ = writeln!(s, "experiments:");
    for e in Experiment::ALL {
        let _ = writeln!(s, "  {:<12} {}", e.name(), e.description());
    }
    let _ = writeln!(
        s,
        "\nworkers default to ${WORKERS_ENV}, then to the number of CPUs.\nexample configs live in configs/."
    );
    s
}

fn unknown_experiment(name: &str) -> ConfigError {
    let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
    let close: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| strsim::levenshtein(n, name) <= 3 || n.starts_with(name))
        .collect();
    let hint = if close.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", close.join(" or "))
    };
    ConfigError(format!(
        "unknown experiment {name:?}{hint}; available: {}",
        names.join(", ")
    ))
}

/// Loads and validates the config; has no side effects.
pub fn prepare(inv: &Invocation) -> Result<Prepared, ConfigError> {
    let mut cfg = ConfigFile::load(&inv.config)?;
    let name = match (&inv.experiment, cfg.get("experiment")) {
        (Some(a), Some(b)) if a != b => {
            return Err(ConfigError(format!(
                "experiment {a:?} on the command line but {b:?} in the config"
            )))
        }
        (Some(a), _) => a.clone(),
        (None, Some(b)) => b.to_string(),
        (None, None) => return Err(ConfigError("no experiment given".into())),
    };
    let experiment = Experiment::from_name(&name).ok_or_else(|| unknown_experiment(&name))?;
    cfg.set("experiment", name);
    if let Some(s) = inv.seed {
        cfg.set("seed", s.to_string());
    }
    if let Some(w) = inv.workers {
        cfg.set("workers", w.to_string());
    }
    if let Some(o) = &inv.out {
        cfg.set("output", o.display().to_string());
    }
    if cfg.get("workers").is_none() {
        if let Some(w) = &inv.env_workers {
            let _: usize = w
                .trim()
                .parse()
                .map_err(|_| ConfigError(format!("{WORKERS_ENV}: not a worker count: {w:?}")))?;
            cfg.set("workers", w.trim().to_string());
        }
    }

    let mut r = config::Reader::new(&cfg);
    r.string("experiment", "");
    let seed = r.u64("seed", 0)?;
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = r.usize_min("workers", default_workers, 1)?;
    let out_dir = PathBuf::from(r.string("output", &format!("out/{}", experiment.name())));
    let plan = experiment.plan(&mut r)?;
    r.finish()?;
    Ok(Prepared {
        experiment,
        plan,
        seed,
        workers,
        out_dir,
        config: cfg,
    })
}

/// Prepares, runs on a pool of the configured size, and writes outputs.
pub fn execute(inv: &Invocation) -> Result<Executed, Failure> {
    let prepared = prepare(inv).map_err(Failure::Config)?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(prepared.workers)
        .build()
        .map_err(|e| Failure::Internal(format!("cannot start worker pool: {e}")))?;
    let outcome = pool
        .install(|| prepared.plan.run(prepared.seed))
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let echo = prepared.config.to_string();
    let info = report::ManifestInfo {
        experiment: prepared.experiment.name(),
        config_echo: &echo,
        seed: prepared.seed,
        workers: prepared.workers,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let files = report::write_outputs(&prepared.out_dir, &outcome, &info).map_err(|e| {
        Failure::Internal(format!("cannot write to {}: {e}", prepared.out_dir.display()))
    })?;
    Ok(Executed {
        prepared,
        outcome,
        files,
    })
}

/// Runs an invocation, reporting to `log`, and returns the exit code.
pub fn run(inv: &Invocation, log: &mut dyn Write) -> i32 {
    match execute(inv) {
        Ok(done) => {
            for c in &done.outcome.checks {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(log, "{mark} {}: {}", c.name, c.detail);
            }
            let _ = writeln!(
                log,
                "wrote {} files to {}",
                done.files.len(),
                done.prepared.out_dir.display()
            );
            if done.outcome.passed() {
                EXIT_OK
            } else {
                EXIT_ASSERTION
            }
        }
        Err(Failure::Config(e)) => {
            let _ = writeln!(log, "config error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Internal(e)) => {
            let _ = writeln!(log, "internal error: {e}");
            EXIT_INTERNAL
        }
    }
}
