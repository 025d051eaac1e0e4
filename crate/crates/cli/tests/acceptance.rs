//! Runs every shipped config through the binary and prints one PASS/FAIL
//! line per acceptance criterion. Criterion 11 reruns criteria 1–10 with
//! 1, 4 and 8 workers and compares the CSV bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tempfile::TempDir;

struct Criterion {
    id: u32,
    title: &'static str,
    config: &'static str,
    limit: Duration,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, title: "cocycle identity", config: "01-cocycle-identity.conf", limit: secs(30) },
    Criterion { id: 2, title: "section invariance", config: "02-section-invariance.conf", limit: secs(60) },
    Criterion { id: 3, title: "fundamental domain", config: "03-fundamental-domain.conf", limit: secs(60) },
    Criterion { id: 4, title: "dissipative volume", config: "04-hopf-volume.conf", limit: secs(60) },
    Criterion { id: 5, title: "sum-integral bound", config: "05-sum-integral.conf", limit: secs(30) },
    Criterion { id: 6, title: "full-shift entropy", config: "06-full-shift-entropy.conf", limit: secs(60) },
    Criterion { id: 7, title: "frequency-band entropy", config: "07-frequency-band-entropy.conf", limit: secs(120) },
    Criterion { id: 8, title: "entropy asymmetry", config: "08-asymmetry.conf", limit: secs(120) },
    Criterion { id: 9, title: "heteroclinic splices", config: "09-heteroclinic.conf", limit: secs(30) },
    Criterion { id: 10, title: "conservative statistics", config: "10-conservative.conf", limit: secs(180) },
];

const WORKERS: [usize; 3] = [1, 4, 8];

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

struct Run {
    code: Option<i32>,
    elapsed: Duration,
    log: String,
    out: PathBuf,
}

fn run(config: &Path, workers: usize, out: PathBuf) -> Run {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_peakdomain"))
        .arg("--config")
        .arg(config)
        .arg("--workers")
        .arg(workers.to_string())
        .arg("--out")
        .arg(&out)
        .env_remove("PEAKDOMAIN_WORKERS")
        .output()
        .expect("binary runs");
    Run {
        code: o.status.code(),
        elapsed: start.elapsed(),
        log: String::from_utf8_lossy(&o.stderr).into_owned(),
        out,
    }
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).into_iter().flatten().flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".csv") {
            files.insert(name, fs::read(entry.path()).unwrap_or_default());
        }
    }
    files
}

fn main() -> ExitCode {
    let tmp = TempDir::new().expect("temp dir");
    let mut all_pass = true;
    let mut determinism_failures = Vec::new();
    for c in &CRITERIA {
        let config = configs_dir().join(c.config);
        let runs: Vec<Run> = WORKERS
            .iter()
            .map(|&w| run(&config, w, tmp.path().join(format!("c{}-w{w}", c.id))))
            .collect();
        let first = &runs[0];
        let timed_out = first.elapsed > c.limit;
        let pass = first.code == Some(0) && !timed_out;
        all_pass &= pass;
        println!(
            "{} criterion {}: {} ({}, exit {:?}, {:.2}s of {}s allowed)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            c.config,
            first.code,
            first.elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        if !pass {
            for line in first.log.lines() {
                println!("    {line}");
            }
        }
        let reference = csv_files(&first.out);
        if reference.is_empty() {
            determinism_failures.push(format!("criterion {} wrote no CSV", c.id));
        }
        for (w, r) in WORKERS.iter().zip(&runs).skip(1) {
            if csv_files(&r.out) != reference {
                determinism_failures.push(format!("criterion {} differs with {w} workers", c.id));
            }
        }
    }
    let deterministic = determinism_failures.is_empty();
    all_pass &= deterministic;
    println!(
        "{} criterion 11: determinism (CSV bytes of criteria 1-10 under {:?} workers)",
        if deterministic { "PASS" } else { "FAIL" },
        WORKERS
    );
    for f in &determinism_failures {
        println!("    {f}");
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
