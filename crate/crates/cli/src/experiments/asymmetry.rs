//! Forward and backward entropy of spliced Bernoulli families.

use peakdomain_core::entropy::{heteroclinic_asymmetry, EntropyEstimate, MAX_WINDOW};
use peakdomain_core::stats::binary_entropy;
use peakdomain_core::Result;

use crate::config::{ConfigError, ConfigResult, Reader};
use crate::report::{Check, Outcome, Table};
use crate::row;

#[derive(Debug, Clone)]
pub struct Params {
    p: f64,
    q: f64,
    m: usize,
    depths: Vec<usize>,
    slope_tol: f64,
    min_gap: f64,
    symmetric_p: Option<f64>,
    symmetric_tol: f64,
}

impl Params {
    pub fn read(r: &mut Reader) -> ConfigResult<Self> {
        let open = (1e-9, 1.0 - 1e-9);
        let p = Self {
            p: r.f64_in("p", 0.5, open.0, open.1)?,
            q: r.f64_in("q", 0.1, open.0, open.1)?,
            m: r.usize("m", 1)?,
            depths: r.usizes("depths", "8..=25")?,
            slope_tol: r.positive("slope_tol", 0.08)?,
            min_gap: r.f64("min_gap", 0.2)?,
            symmetric_p: match r.string("symmetric_p", "none").as_str() {
                "none" => None,
                _ => Some(r.f64_in("symmetric_p", 0.3, open.0, open.1)?),
            },
            symmetric_tol: r.positive("symmetric_tol", 0.05)?,
        };
        if p.depths.len() < 4 {
            return Err(ConfigError("depths: need at least four depths".into()));
        }
        for &n in &p.depths {
            if n == 0 || n + 2 * p.m + 1 > MAX_WINDOW {
                return Err(ConfigError(format!(
                    "depths: depth {n} at m = {} exceeds the window cap {MAX_WINDOW}",
                    p.m
                )));
            }
        }
        Ok(p)
    }

    pub fn run(&self) -> Result<Outcome> {
        let mut cases = vec![("spliced", self.p, self.q)];
        if let Some(s) = self.symmetric_p {
            cases.push(("symmetric", s, s));
        }
        let mut detail = Table::new(
            "asymmetry.csv",
            &[
                "case",
                "direction",
                "m",
                "n",
                "count",
                "log_count",
                "slope",
                "t_lo",
                "t_hi",
            ],
        );
        let mut summary = Table::new(
            "asymmetry_summary.csv",
            &[
                "case",
                "p",
                "q",
                "forward_slope",
                "backward_slope",
                "forward_target",
                "backward_target",
            ],
        );
        let mut out = Outcome::default();
        for (name, p, q) in cases {
            let report = heteroclinic_asymmetry(p, q, self.m, &self.depths)?;
            push(&mut detail, name, "forward", &report.forward);
            push(&mut detail, name, "backward", &report.backward);
            let (f, b) = (report.forward.slope, report.backward.slope);
            let (tf, tb) = (binary_entropy(p), binary_entropy(q));
            summary.push(row![name, p, q, f, b, tf, tb]);
            if name == "spliced" {
                out.checks.push(Check::new(
                    "forward slope",
                    (f - tf).abs() <= self.slope_tol,
                    format!("{f} vs H({p}) = {tf} (tol {})", self.slope_tol),
                ));
                out.checks.push(Check::new(
                    "backward slope",
                    (b - tb).abs() <= self.slope_tol,
                    format!("{b} vs H({q}) = {tb} (tol {})", self.slope_tol),
                ));
                out.checks.push(Check::new(
                    "direction gap",
                    f - b >= self.min_gap,
                    format!("forward − backward = {} (need ≥ {})", f - b, self.min_gap),
                ));
            } else {
                out.checks.push(Check::new(
                    "symmetric splice",
                    (f - b).abs() <= self.symmetric_tol,
                    format!("p = q = {p}: |{f} − {b}| = {} (tol {})", (f - b).abs(), self.symmetric_tol),
                ));
            }
        }
        out.tables.push(detail);
        out.tables.push(summary);
        Ok(out)
    }
}

fn push(table: &mut Table, case: &str, direction: &str, est: &EntropyEstimate) {
    for ((n, count), log_count) in est.depths.iter().zip(&est.counts).zip(&est.log_counts) {
        table.push(row![case, direction, est.m, n, count, log_count, est.slope, est.t_lo, est.t_hi]);
    }
}
