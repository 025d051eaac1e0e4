use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn peakdomain(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peakdomain"))
        .args(args)
        .current_dir(dir)
        .env_remove("PEAKDOMAIN_WORKERS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_arguments_prints_every_experiment() {
    let tmp = TempDir::new().unwrap();
    let o = peakdomain(&[], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["orbit", "peaks", "fund-domain", "hopf", "birkhoff", "entropy", "asymmetry"] {
        assert!(text.contains(name), "help lacks {name}");
    }
    let help = peakdomain(&["--help"], tmp.path());
    assert!(String::from_utf8_lossy(&help.stdout).contains("fund-domain"));
}

#[test]
fn malformed_config_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "experiment = orbit\nthis is not a pair\n");
    let o = peakdomain(&["orbit", "--config", &cfg, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_key_and_bad_values_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    for text in [
        "experiment = orbit\ncases = 10\nflavour = mint\n",
        "experiment = orbit\ncases = 0\n",
        "experiment = orbit\ntol = -1\n",
        "experiment = peaks\nhorizon = 40\nmax_shift = 30\n",
        "experiment = entropy\nresolutions = 0..=5\ncount_depths = 20..=22\n",
        "experiment = hopf\nchecks = volume, magic\n",
        "experiment = fund-domain\nsystem = cat-map\n",
        "experiment = orbit\nseed = 1\nseed = 2\n",
    ] {
        let cfg = write_config(tmp.path(), text);
        let o = peakdomain(&["--config", &cfg, "--out", "out"], tmp.path());
        assert_eq!(o.status.code(), Some(2), "{text}: {}", stderr(&o));
        assert!(stderr(&o).contains("config error"));
        assert!(!tmp.path().join("out").exists());
    }
}

#[test]
fn unknown_experiment_lists_suggestions() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "experiment = hopff\n");
    let o = peakdomain(&["--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("did you mean hopf"), "{err}");
    assert!(err.contains("asymmetry"));
}

#[test]
fn experiment_names_must_agree() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "experiment = orbit\n");
    let o = peakdomain(&["peaks", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fund_domain_rows_hit_once() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "experiment = fund-domain\nsystem = north-south\nhorizon = 80\nsamples = 40\n",
    );
    let o = peakdomain(&["fund-domain", "--config", &cfg, "--out", "fd", "--workers", "2"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("fd/fundamental_domain.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "orbit_hits_W").unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.split(',').nth(col) == Some("1")));
    assert!(!csv.contains('\r'));

    let manifest = fs::read_to_string(tmp.path().join("fd/manifest.txt")).unwrap();
    assert!(manifest.contains("status: PASS"));
    assert!(manifest.contains("fundamental_domain.csv"));
    assert!(manifest.contains("wandering.csv"));
    assert!(manifest.contains("samples = 40"));
}

#[test]
fn cat_map_volume_is_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "experiment = hopf\nsystem = cat-map\nsamples = 200\n");
    let o = peakdomain(&["--config", &cfg, "--out", "h"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("h/hopf_volume.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "cat-map");
    assert_eq!(row[2], "0");
    assert_eq!(row[5], "0");
}

#[test]
fn failed_assertion_exits_one_with_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "experiment = asymmetry\ndepths = 6..=12\nm = 0\nmin_gap = 5\n",
    );
    let o = peakdomain(&["--config", &cfg, "--out", "a"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAIL direction gap"));
    let manifest = fs::read_to_string(tmp.path().join("a/manifest.txt")).unwrap();
    assert!(manifest.contains("status: FAIL"));
    assert!(manifest.contains("FAIL direction gap"));
}

#[test]
fn unwritable_output_is_internal_error() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("blocker"), "x").unwrap();
    let cfg = write_config(tmp.path(), "experiment = orbit\ncases = 5\n");
    let o = peakdomain(&["--config", &cfg, "--out", "blocker/sub"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn worker_env_is_a_fallback() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "experiment = orbit\ncases = 5\n");
    let bad = Command::new(env!("CARGO_BIN_EXE_peakdomain"))
        .args(["--config", &cfg, "--out", "w"])
        .current_dir(tmp.path())
        .env("PEAKDOMAIN_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_peakdomain"))
        .args(["--config", &cfg, "--out", "w"])
        .current_dir(tmp.path())
        .env("PEAKDOMAIN_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let manifest = fs::read_to_string(tmp.path().join("w/manifest.txt")).unwrap();
    assert!(manifest.contains("workers: 3"));
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "experiment = orbit\ncases = 50\nseed = 1\n");
    let run = |seed: &str, out: &str| {
        let o = peakdomain(&["--config", &cfg, "--seed", seed, "--out", out], tmp.path());
        assert_eq!(o.status.code(), Some(0));
        fs::read(tmp.path().join(out).join("cocycle_identity.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("1", "b"));
    assert_ne!(run("1", "a"), run("2", "c"));
}
