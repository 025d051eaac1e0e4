//! CSV tables, assertion results and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Builds a CSV row from anything `Display`.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => {
        vec![$($v.to_string()),*]
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: &'static [&'static str]) -> Self {
        Self {
            file,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width for {}", self.file);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        push_line(&mut out, self.header.iter().copied());
        for row in &self.rows {
            push_line(&mut out, row.iter().map(String::as_str));
        }
        out
    }

    /// Values of one column, by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

fn push_line<'a>(out: &mut String, fields: impl Iterator<Item = &'a str>) {
    for (i, f) in fields.enumerate() {
        if i > 0 {
            out.push(',');
        }
        if f.contains([',', '"', '\n']) {
            out.push('"');
            out.push_str(&f.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(f);
        }
    }
    out.push('\n');
}

/// One evaluated assertion.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }
}

pub struct ManifestInfo<'a> {
    pub experiment: &'a str,
    pub config_echo: &'a str,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
}

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Writes every table, then the manifest. Returns the paths written.
pub fn write_outputs(dir: &Path, outcome: &Outcome, info: &ManifestInfo) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &outcome.tables {
        let path = dir.join(t.file);
        fs::write(&path, t.to_csv())?;
        written.push(path);
    }
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, manifest(outcome, info))?;
    written.push(path);
    Ok(written)
}

pub fn manifest(outcome: &Outcome, info: &ManifestInfo) -> String {
    let mut m = String::new();
    let status = if outcome.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(m, "peakdomain {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "experiment: {}", info.experiment);
    let _ = writeln!(m, "seed: {}", info.seed);
    let _ = writeln!(m, "workers: {}", info.workers);
    let _ = writeln!(m, "wall_time_s: {:.3}", info.wall_time_s);
    let _ = writeln!(m, "status: {status}");
    let _ = writeln!(m, "\n[config]");
    m.push_str(info.config_echo);
    let _ = writeln!(m, "\n[checks]");
    for c in &outcome.checks {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(m, "{mark} {}: {}", c.name, c.detail);
    }
    let _ = writeln!(m, "\n[files]");
    for t in &outcome.tables {
        let _ = writeln!(m, "{} ({} rows)", t.file, t.rows.len());
    }
    m
}
