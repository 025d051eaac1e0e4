//! Bowen-ball counts and entropy slopes for the full shift and for
//! frequency bands, with a brute-force cross-check of the class counts.

use std::f64::consts::LN_2;

use peakdomain_core::birkhoff::Direction;
use peakdomain_core::entropy::{
    brute_force_count, cover_count, h_estimate, EntropyEstimate, WordSetOracle,
    BRUTE_FORCE_MAX_WINDOW, MAX_WINDOW,
};
use peakdomain_core::stats::binary_entropy;
use peakdomain_core::Result;

use crate::config::{parse_number, ConfigError, ConfigResult, Reader};
use crate::report::{Check, Outcome, Table};
use crate::row;

const ENTROPY_HEADER: &[&str] = &["m", "n", "count", "log_count", "slope", "t_lo", "t_hi"];

#[derive(Debug, Clone)]
pub struct Params {
    checks: Vec<String>,
    resolutions: Vec<usize>,
    count_depths: Vec<usize>,
    slope_depths: Vec<usize>,
    slope_tol: f64,
    stability_tol: f64,
    bands: Vec<(f64, f64)>,
    brute_force_depths: Vec<usize>,
    brute_force_resolutions: Vec<usize>,
    band_p: f64,
    band_delta: f64,
    band_depth: usize,
    rate_tol: f64,
}

fn window_ok(key: &str, n: usize, m: usize, cap: usize) -> ConfigResult<()> {
    if n == 0 || n + 2 * m + 1 > cap {
        return Err(ConfigError(format!(
            "{key}: depth {n} at resolution {m} needs window {} outside 2..={cap}",
            n + 2 * m + 1
        )));
    }
    Ok(())
}

impl Params {
    pub fn read(r: &mut Reader) -> ConfigResult<Self> {
        let checks = r.list("checks", "full-shift");
        if checks.is_empty() {
            return Err(ConfigError("checks: empty list".into()));
        }
        for c in &checks {
            if c != "full-shift" && c != "frequency-band" {
                return Err(ConfigError(format!(
                    "checks: unknown check {c:?}; expected full-shift or frequency-band"
                )));
            }
        }
        let bands = r
            .list("brute_force_bands", "0.1:0.05, 0.25:1/24, 0.5:0.05, 0.5:0")
            .iter()
            .map(|item| {
                let (p, d) = item
                    .split_once(':')
                    .ok_or_else(|| ConfigError(format!("brute_force_bands: expected p:delta, got {item:?}")))?;
                let p = parse_number(p).map_err(|e| ConfigError(format!("brute_force_bands: {e}")))?;
                let d = parse_number(d).map_err(|e| ConfigError(format!("brute_force_bands: {e}")))?;
                if !(0.0..=1.0).contains(&p) || d < 0.0 {
                    return Err(ConfigError(format!(
                        "brute_force_bands: need p in [0,1] and delta ≥ 0, got {item:?}"
                    )));
                }
                Ok((p, d))
            })
            .collect::<ConfigResult<Vec<_>>>()?;
        let p = Self {
            checks,
            resolutions: r.usizes("resolutions", "0..=2")?,
            count_depths: r.usizes("count_depths", "1..=20")?,
            slope_depths: r.usizes("slope_depths", "8..=20")?,
            slope_tol: r.positive("slope_tol", 0.02)?,
            stability_tol: r.positive("stability_tol", 0.01)?,
            bands,
            brute_force_depths: r.usizes("brute_force_depths", "4, 8, 12, 16, 20, 21")?,
            brute_force_resolutions: r.usizes("brute_force_resolutions", "0")?,
            band_p: r.f64_in("band_p", 0.25, 0.0, 1.0)?,
            band_delta: r.f64_in("band_delta", 1.0 / 24.0, 0.0, 1.0)?,
            band_depth: r.usize_min("band_depth", 24, 1)?,
            rate_tol: r.positive("rate_tol", 0.08)?,
        };
        if p.resolutions.is_empty() || p.slope_depths.len() < 4 {
            return Err(ConfigError(
                "need at least one resolution and four slope depths".into(),
            ));
        }
        for &m in &p.resolutions {
            for &n in p.count_depths.iter().chain(&p.slope_depths) {
                window_ok("resolutions/depths", n, m, MAX_WINDOW)?;
            }
        }
        for &m in &p.brute_force_resolutions {
            for &n in &p.brute_force_depths {
                window_ok("brute_force_depths", n, m, BRUTE_FORCE_MAX_WINDOW)?;
            }
        }
        window_ok("band_depth", p.band_depth, 0, MAX_WINDOW)?;
        Ok(p)
    }

    fn enabled(&self, check: &str) -> bool {
        self.checks.iter().any(|c| c == check)
    }

    pub fn run(&self) -> Result<Outcome> {
        let mut out = Outcome::default();
        if self.enabled("full-shift") {
            self.full_shift(&mut out)?;
        }
        if self.enabled("frequency-band") {
            self.frequency_band(&mut out)?;
        }
        Ok(out)
    }

    fn full_shift(&self, out: &mut Outcome) -> Result<()> {
        let e = WordSetOracle::FullShift;
        let mut counts = Table::new("full_shift_counts.csv", &["m", "n", "count", "expected", "match"]);
        let mut mismatches = 0;
        for &m in &self.resolutions {
            for &n in &self.count_depths {
                let count = cover_count(&e, n, m, Direction::Forward)?;
                let expected = 1u64 << (n + 2 * m + 1);
                mismatches += usize::from(count != expected);
                counts.push(row![m, n, count, expected, count == expected]);
            }
        }
        let mut table = Table::new("entropy.csv", ENTROPY_HEADER);
        let mut estimates = Vec::new();
        for &m in &self.resolutions {
            let est = h_estimate(&e, m, &self.slope_depths, Direction::Forward)?;
            push_estimate(&mut table, &est);
            estimates.push(est);
        }
        out.tables.push(counts);
        out.tables.push(table);
        out.checks.push(Check::new(
            "full-shift counts",
            mismatches == 0,
            format!(
                "{} (m, n) pairs against 2^(n+2m+1), {mismatches} mismatches",
                self.resolutions.len() * self.count_depths.len()
            ),
        ));
        let worst = estimates
            .iter()
            .map(|e| (e.slope - LN_2).abs())
            .fold(0.0, f64::max);
        out.checks.push(Check::new(
            "full-shift slope",
            worst <= self.slope_tol,
            format!("largest |slope − ln 2| = {worst:e} (tol {})", self.slope_tol),
        ));
        let drift = estimates
            .windows(2)
            .map(|w| (w[0].slope - w[1].slope).abs())
            .fold(0.0, f64::max);
        out.checks.push(Check::new(
            "resolution stability",
            drift <= self.stability_tol,
            format!(
                "largest slope change between consecutive resolutions {drift:e} (tol {})",
                self.stability_tol
            ),
        ));
        Ok(())
    }

    fn frequency_band(&self, out: &mut Outcome) -> Result<()> {
        let mut table = Table::new(
            "band_counts.csv",
            &["p", "delta", "m", "n", "window", "cover_count", "brute_force_count", "match"],
        );
        let mut mismatches = 0;
        let mut cases = 0;
        for &(p, delta) in &self.bands {
            let e = WordSetOracle::frequency_band(p, delta)?;
            for &m in &self.brute_force_resolutions {
                for &n in &self.brute_force_depths {
                    let fast = cover_count(&e, n, m, Direction::Forward)?;
                    let slow = brute_force_count(&e, n, m, Direction::Forward)?;
                    mismatches += usize::from(fast != slow);
                    cases += 1;
                    table.push(row![p, delta, m, n, n + 2 * m + 1, fast, slow, fast == slow]);
                }
            }
        }
        out.tables.push(table);
        out.checks.push(Check::new(
            "band counts match brute force",
            mismatches == 0,
            format!("{cases} cases, {mismatches} mismatches"),
        ));

        let e = WordSetOracle::frequency_band(self.band_p, self.band_delta)?;
        let count = cover_count(&e, self.band_depth, 0, Direction::Forward)?;
        let rate = (count as f64).ln() / self.band_depth as f64;
        let target = binary_entropy(self.band_p);
        let diff = (rate - target).abs();
        let mut table = Table::new(
            "band_rate.csv",
            &["p", "delta", "n", "count", "rate", "binary_entropy", "abs_diff"],
        );
        table.push(row![self.band_p, self.band_delta, self.band_depth, count, rate, target, diff]);
        out.tables.push(table);
        out.checks.push(Check::new(
            "band growth rate",
            diff <= self.rate_tol,
            format!("(1/n) log count = {rate} vs H(p) = {target}, diff {diff} (tol {})", self.rate_tol),
        ));
        Ok(())
    }
}

fn push_estimate(table: &mut Table, est: &EntropyEstimate) {
    for ((n, count), log_count) in est.depths.iter().zip(&est.counts).zip(&est.log_counts) {
        table.push(row![est.m, n, count, log_count, est.slope, est.t_lo, est.t_hi]);
    }
}
