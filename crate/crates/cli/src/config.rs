//! `key = value` configuration files.
//!
//! Lines are trimmed; blank lines and lines starting with `#` are ignored,
//! and a `#` after a value starts a comment. Keys may appear once. Every
//! experiment reads the keys it knows through a [`Reader`]; anything left
//! unread is rejected.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("{0}")]
pub struct ConfigError(pub String);

pub type ConfigResult<T> = Result<T, ConfigError>;

macro_rules! bail {
    ($($arg:tt)*) => {
        return Err(ConfigError(format!($($arg)*)))
    };
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: Vec<(String, String)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got {raw:?}", lineno + 1);
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            {
                bail!("line {}: invalid key {key:?}", lineno + 1);
            }
            if value.is_empty() {
                bail!("line {}: key {key} has an empty value", lineno + 1);
            }
            if entries.iter().any(|(k, _)| k == key) {
                bail!("line {}: duplicate key {key}", lineno + 1);
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Overrides or adds a key (command-line flags win over the file).
    pub fn set(&mut self, key: &str, value: String) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }
}

impl fmt::Display for ConfigFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Typed access to a config that remembers which keys were read.
pub struct Reader<'a> {
    file: &'a ConfigFile,
    used: BTreeSet<&'static str>,
}

impl<'a> Reader<'a> {
    pub fn new(file: &'a ConfigFile) -> Self {
        Self {
            file,
            used: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a str> {
        self.used.insert(key);
        self.file.get(key)
    }

    pub fn string(&mut self, key: &'static str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    pub fn u64(&mut self, key: &'static str, default: u64) -> ConfigResult<u64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .replace('_', "")
                .parse()
                .map_err(|_| ConfigError(format!("{key}: expected a non-negative integer, got {v:?}"))),
        }
    }

    pub fn usize(&mut self, key: &'static str, default: usize) -> ConfigResult<usize> {
        Ok(self.u64(key, default as u64)? as usize)
    }

    /// Integer that must be at least `min`.
    pub fn usize_min(&mut self, key: &'static str, default: usize, min: usize) -> ConfigResult<usize> {
        let v = self.usize(key, default)?;
        if v < min {
            bail!("{key} must be ≥ {min}, got {v}");
        }
        Ok(v)
    }

    pub fn f64(&mut self, key: &'static str, default: f64) -> ConfigResult<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_number(v).map_err(|e| ConfigError(format!("{key}: {e}"))),
        }
    }

    /// Real number in `[lo, hi]`.
    pub fn f64_in(&mut self, key: &'static str, default: f64, lo: f64, hi: f64) -> ConfigResult<f64> {
        let v = self.f64(key, default)?;
        if !(lo..=hi).contains(&v) {
            bail!("{key} must lie in [{lo}, {hi}], got {v}");
        }
        Ok(v)
    }

    pub fn positive(&mut self, key: &'static str, default: f64) -> ConfigResult<f64> {
        let v = self.f64(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            bail!("{key} must be positive, got {v}");
        }
        Ok(v)
    }

    pub fn list(&mut self, key: &'static str, default: &str) -> Vec<String> {
        self.string(key, default)
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    }

    /// Comma list of integers and inclusive ranges `a..=b`.
    pub fn usizes(&mut self, key: &'static str, default: &str) -> ConfigResult<Vec<usize>> {
        let mut out = Vec::new();
        for item in self.list(key, default) {
            if let Some((a, b)) = item.split_once("..=") {
                let a: usize = a.trim().parse().map_err(|_| bad_list(key, &item))?;
                let b: usize = b.trim().parse().map_err(|_| bad_list(key, &item))?;
                if a > b {
                    return Err(bad_list(key, &item));
                }
                out.extend(a..=b);
            } else {
                out.push(item.parse().map_err(|_| bad_list(key, &item))?);
            }
        }
        Ok(out)
    }

    /// Errors on keys that no reader asked for.
    pub fn finish(self) -> ConfigResult<()> {
        let unknown: Vec<&str> = self
            .file
            .entries()
            .iter()
            .map(|(k, _)| k.as_str())
            .filter(|k| !self.used.contains(k))
            .collect();
        if !unknown.is_empty() {
            let known: Vec<&str> = self.used.iter().copied().collect();
            bail!(
                "unknown key(s): {}; this experiment accepts: {}",
                unknown.join(", "),
                known.join(", ")
            );
        }
        Ok(())
    }
}

fn bad_list(key: &str, item: &str) -> ConfigError {
    ConfigError(format!("{key}: bad list item {item:?}"))
}

/// Decimal or `a/b` fraction.
pub fn parse_number(v: &str) -> Result<f64, String> {
    let v = v.trim();
    let value = if let Some((a, b)) = v.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| format!("not a number: {v:?}"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("not a number: {v:?}"))?;
        a / b
    } else {
        v.parse().map_err(|_| format!("not a number: {v:?}"))?
    };
    if !value.is_finite() {
        return Err(format!("not a finite number: {v:?}"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let c = ConfigFile::parse("# header\n\nexperiment = orbit  # trailing\nseed=7\n").unwrap();
        assert_eq!(c.get("experiment"), Some("orbit"));
        assert_eq!(c.get("seed"), Some("7"));
        assert_eq!(c.entries().len(), 2);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse("seed 7").is_err());
        assert!(ConfigFile::parse("seed = ").is_err());
        assert!(ConfigFile::parse("Seed = 1").is_err());
        assert!(ConfigFile::parse("seed = 1\nseed = 2").is_err());
    }

    #[test]
    fn reader_tracks_unknown_keys() {
        let c = ConfigFile::parse("seed = 7\nbogus = 1").unwrap();
        let mut r = Reader::new(&c);
        assert_eq!(r.u64("seed", 0).unwrap(), 7);
        let err = r.finish().unwrap_err();
        assert!(err.0.contains("bogus"));
    }

    #[test]
    fn numbers_and_lists() {
        let c = ConfigFile::parse("d = 1/24\nn = 8..=10, 12\nbig = 200_000\nneg = -1").unwrap();
        let mut r = Reader::new(&c);
        assert!((r.f64("d", 0.0).unwrap() - 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(r.usizes("n", "").unwrap(), vec![8, 9, 10, 12]);
        assert_eq!(r.u64("big", 0).unwrap(), 200_000);
        assert!(r.usize("neg", 0).is_err());
        assert!(r.positive("missing", 1.0).is_ok());
        assert!(r.f64_in("d", 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut c = ConfigFile::parse("seed = 7").unwrap();
        c.set("seed", "9".into());
        c.set("workers", "2".into());
        assert_eq!(c.get("seed"), Some("9"));
        assert_eq!(c.get("workers"), Some("2"));
    }
}
