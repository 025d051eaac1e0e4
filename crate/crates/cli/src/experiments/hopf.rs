//! Hopf-side checks: dissipative volume estimates, the sum–integral bound
//! over a wandering interval, and recurrence and ε-density on the cat map.

use peakdomain_core::hopf::{
    estimate_h_volume, parse_rational, recurrence_check, sum_integral_check, transitivity_report,
    uniform_ns, uniform_torus, wandering_check, HopfReport, NsInterval, Region, Square,
};
use peakdomain_core::{CatMap, NorthSouth, PeakOptions, Result, SystemKind};

use super::systems;
use crate::config::{ConfigError, ConfigResult, Reader};
use crate::report::{Check, Outcome, Table};
use crate::row;

const CHECKS: [&str; 4] = ["volume", "integral", "recurrence", "transitivity"];

#[derive(Debug, Clone)]
pub struct Params {
    checks: Vec<String>,
    systems: Vec<SystemKind>,
    samples: usize,
    horizon: usize,
    max_ci_width: f64,
    annulus: NsInterval,
    wandering_horizon: usize,
    integral_horizon: usize,
    quadrature_points: usize,
    integral_tol: f64,
    square: Square,
    recurrence_samples: usize,
    iterations: u64,
    min_returns: u64,
    eps: f64,
    min_fraction: f64,
}

impl Params {
    pub fn read(r: &mut Reader) -> ConfigResult<Self> {
        let checks = r.list("checks", "volume");
        if checks.is_empty() {
            return Err(ConfigError("checks: empty list".into()));
        }
        for c in &checks {
            if !CHECKS.contains(&c.as_str()) {
                return Err(ConfigError(format!(
                    "checks: unknown check {c:?}; expected any of {}",
                    CHECKS.join(", ")
                )));
            }
        }
        let radius = r.string("annulus_radius", "3/10");
        let annulus = parse_rational(&radius)
            .and_then(NsInterval::annulus)
            .map_err(|e| ConfigError(format!("annulus_radius: {e}")))?;
        let square = Square {
            x: r.f64_in("square_x", 0.0, 0.0, 1.0)?,
            y: r.f64_in("square_y", 0.0, 0.0, 1.0)?,
            side: r.f64_in("square_side", 0.2, f64::MIN_POSITIVE, 1.0)?,
        };
        Ok(Self {
            checks,
            systems: systems(
                r,
                "north-south, cat-map",
                &[SystemKind::NorthSouth, SystemKind::CatMap],
            )?,
            samples: r.usize_min("samples", 2000, 1)?,
            horizon: r.usize_min("horizon", 80, 8)?,
            max_ci_width: r.f64_in("max_ci_width", 0.02, 0.0, 1.0)?,
            annulus,
            wandering_horizon: r.usize_min("wandering_horizon", 30, 1)?,
            integral_horizon: r.usize_min("integral_horizon", 40, 1)?,
            quadrature_points: r.usize_min("quadrature_points", 20_000, 1)?,
            integral_tol: r.positive("integral_tol", 1e-3)?,
            square,
            recurrence_samples: r.usize_min("recurrence_samples", 500, 1)?,
            iterations: r.u64("iterations", 200_000)?,
            min_returns: r.u64("min_returns", 100)?,
            eps: r.positive("eps", 0.05)?,
            min_fraction: r.f64_in("min_fraction", 0.99, 0.0, 1.0)?,
        })
    }

    fn enabled(&self, check: &str) -> bool {
        self.checks.iter().any(|c| c == check)
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mut out = Outcome::default();
        if self.enabled("volume") {
            self.volume(seed, &mut out)?;
        }
        if self.enabled("integral") {
            self.integral(&mut out)?;
        }
        if self.enabled("recurrence") {
            self.recurrence(seed, &mut out)?;
        }
        if self.enabled("transitivity") {
            self.transitivity(seed, &mut out)?;
        }
        Ok(out)
    }

    fn volume(&self, seed: u64, out: &mut Outcome) -> Result<()> {
        let opts = PeakOptions::new(self.horizon);
        let mut summary = Table::new(
            "hopf_volume.csv",
            &[
                "system",
                "samples",
                "dissipative",
                "conservative_suspect",
                "unknown",
                "estimate",
                "ci_lo",
                "ci_hi",
                "ci_width",
                "transitivity_lower_bound",
            ],
        );
        let mut classes = Table::new("hopf_classes.csv", &["system", "index", "class"]);
        for &kind in &self.systems {
            let report: HopfReport = match kind {
                SystemKind::NorthSouth => {
                    estimate_h_volume(&NorthSouth, uniform_ns, self.samples, &opts, seed)?
                }
                _ => estimate_h_volume(&CatMap, uniform_torus, self.samples, &opts, seed)?,
            };
            let (lo, hi) = report.interval;
            summary.push(row![
                kind.name(),
                report.samples(),
                report.dissipative,
                report.conservative_suspect,
                report.unknown,
                report.estimate,
                lo,
                hi,
                report.interval_width(),
                report.transitivity_lower_bound()
            ]);
            for (i, c) in report.classes.iter().enumerate() {
                classes.push(row![kind.name(), i, c.name()]);
            }
            out.checks.push(match kind {
                SystemKind::NorthSouth => Check::new(
                    "north-south volume is dissipative",
                    format!("{:.2}", report.estimate) == "1.00"
                        && report.interval_width() <= self.max_ci_width,
                    format!(
                        "estimate {:.4}, CI [{lo:.4}, {hi:.4}] width {:.4} (max {}), unknown {}",
                        report.estimate,
                        report.interval_width(),
                        self.max_ci_width,
                        report.unknown
                    ),
                ),
                _ => Check::new(
                    "cat-map volume is conservative",
                    report.estimate == 0.0 && report.conservative_suspect == report.samples(),
                    format!(
                        "estimate {}, {} of {} conservative-suspect",
                        report.estimate,
                        report.conservative_suspect,
                        report.samples()
                    ),
                ),
            });
        }
        out.tables.push(summary);
        out.tables.push(classes);
        Ok(())
    }

    fn integral(&self, out: &mut Outcome) -> Result<()> {
        let cert = wandering_check(&Region::Interval(self.annulus.clone()), self.wandering_horizon)?;
        let report = sum_integral_check(&self.annulus, self.integral_horizon, self.quadrature_points)?;
        let n = self.integral_horizon as i64;
        let mut terms = Table::new("sum_integral_terms.csv", &["n", "integral", "image_length"]);
        for (i, v) in report.per_step.iter().enumerate() {
            let k = i as i64 - n;
            terms.push(row![k, v, self.annulus.image(k).length_f64()]);
        }
        let diff = (report.value - report.image_lengths).abs();
        let mut summary = Table::new(
            "sum_integral.csv",
            &[
                "horizon",
                "quadrature_points",
                "value",
                "image_lengths",
                "abs_diff",
                "tail_decaying",
                "wandering_pass",
            ],
        );
        summary.push(row![
            self.integral_horizon,
            self.quadrature_points,
            report.value,
            report.image_lengths,
            diff,
            report.tail_decaying,
            cert.pass
        ]);
        out.tables.push(summary);
        out.tables.push(terms);
        out.checks.push(Check::new(
            "sum-integral bound",
            cert.pass && report.value <= 1.0 + self.integral_tol,
            format!(
                "value {} ≤ 1 + {} over a wandering interval (wandering {})",
                report.value, self.integral_tol, cert.pass
            ),
        ));
        out.checks.push(Check::new(
            "sum-integral matches image lengths",
            diff <= self.integral_tol,
            format!("|{} − {}| = {diff:e}", report.value, report.image_lengths),
        ));
        Ok(())
    }

    fn recurrence(&self, seed: u64, out: &mut Outcome) -> Result<()> {
        let report = recurrence_check(&self.square, self.recurrence_samples, self.iterations, seed)?;
        let mut table = Table::new("recurrence.csv", &["index", "returns"]);
        for (i, r) in report.returns.iter().enumerate() {
            table.push(row![i, r]);
        }
        let mut fractions = Table::new("recurrence_fractions.csv", &["min_returns", "fraction"]);
        for (t, f) in &report.fractions {
            fractions.push(row![t, f]);
        }
        let hits = report.returns.iter().filter(|&&r| r >= self.min_returns).count();
        let fraction = hits as f64 / report.returns.len() as f64;
        out.tables.push(table);
        out.tables.push(fractions);
        out.checks.push(Check::new(
            "cat-map recurrence",
            fraction >= self.min_fraction,
            format!(
                "{hits} of {} samples return ≥ {} times to the {} square within {} iterates (fraction {fraction}, need {})",
                report.returns.len(),
                self.min_returns,
                self.square.side,
                self.iterations,
                self.min_fraction
            ),
        ));
        Ok(())
    }

    fn transitivity(&self, seed: u64, out: &mut Outcome) -> Result<()> {
        let report = transitivity_report(self.recurrence_samples, self.iterations, self.eps, seed)?;
        let mut table = Table::new("transitivity.csv", &["index", "covered_at"]);
        for (i, c) in report.covered_at.iter().enumerate() {
            table.push(row![i, c.map(|t| t.to_string()).unwrap_or_default()]);
        }
        out.tables.push(table);
        out.checks.push(Check::new(
            "cat-map ε-density",
            report.fraction >= self.min_fraction,
            format!(
                "fraction {} of {} samples {}-dense within {} iterates ({} cells per axis, need {})",
                report.fraction,
                report.covered_at.len(),
                self.eps,
                self.iterations,
                report.cells_per_axis,
                self.min_fraction
            ),
        ));
        Ok(())
    }
}

