//! Separating observables for two Bernoulli measures and certified peaks
//! at points spliced from a `ν`-typical past and a `µ`-typical future.

use peakdomain_core::birkhoff::{
    ergodic_obstruction_demo, expected_value, heteroclinic_peak_check, separating_observable,
    splice, MeasureSpec, WordSource,
};
use peakdomain_core::{
    Cocycle, DynamicalSystem, Error, FullShift, ObservableSpec, PeakOptions, Result,
};
use rayon::prelude::*;

use crate::config::{ConfigError, ConfigResult, Reader};
use crate::report::{Check, Outcome, Table};
use crate::row;

#[derive(Debug, Clone)]
pub struct Params {
    mu_p: f64,
    nu_p: f64,
    dictionary: Vec<ObservableSpec>,
    dictionary_name: String,
    expected_a: Option<f64>,
    expected_b: Option<f64>,
    splices: usize,
    half_length: usize,
    opts: PeakOptions,
    max_shift: usize,
    obstruction_samples: usize,
    obstruction_length: u64,
    obstruction_tol: f64,
    obstruction_min_fraction: f64,
}

impl Params {
    pub fn read(r: &mut Reader) -> ConfigResult<Self> {
        let mu_p = r.f64_in("mu_p", 0.5, 1e-9, 1.0 - 1e-9)?;
        let nu_p = r.f64_in("nu_p", 0.1, 1e-9, 1.0 - 1e-9)?;
        let dictionary_name = r.string("dictionary", "indicator");
        let radius = r.usize("cylinder_radius", 1)?;
        let dictionary = match dictionary_name.as_str() {
            "indicator" => vec![ObservableSpec::symbol_indicator()],
            "cylinders" => ObservableSpec::cylinder_dictionary(radius)
                .map_err(|e| ConfigError(format!("cylinder_radius: {e}")))?,
            other => {
                return Err(ConfigError(format!(
                    "dictionary: expected indicator or cylinders, got {other:?}"
                )))
            }
        };
        let expected = |r: &mut Reader, key| -> ConfigResult<Option<f64>> {
            Ok(match r.string(key, "").as_str() {
                "" => None,
                _ => Some(r.f64(key, 0.0)?),
            })
        };
        let expected_a = expected(r, "expected_a")?;
        let expected_b = expected(r, "expected_b")?;
        let horizon = r.usize_min("horizon", 48, 8)?;
        let drift_window = r.usize_min("drift_window", horizon / 2, 1)?;
        let opts = PeakOptions::new(horizon)
            .exact()
            .with_drift_window(drift_window);
        opts.validate().map_err(|e| ConfigError(e.to_string()))?;
        let p = Self {
            mu_p,
            nu_p,
            dictionary,
            dictionary_name,
            expected_a,
            expected_b,
            splices: r.usize_min("splices", 8, 1)?,
            half_length: r.usize_min("half_length", 64, 1)?,
            opts,
            max_shift: r.usize("max_shift", 8)?,
            obstruction_samples: r.usize("obstruction_samples", 0)?,
            obstruction_length: r.u64("obstruction_length", 100_000)?,
            obstruction_tol: r.positive("obstruction_tol", 0.02)?,
            obstruction_min_fraction: r.f64_in("obstruction_min_fraction", 0.95, 0.0, 1.0)?,
        };
        if p.mu_p == p.nu_p {
            return Err(ConfigError("mu_p and nu_p must differ".into()));
        }
        if p.obstruction_samples > 0 && p.obstruction_length == 0 {
            return Err(ConfigError("obstruction_length must be positive".into()));
        }
        Ok(p)
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let mu = MeasureSpec::bernoulli(self.mu_p)?;
        let nu = MeasureSpec::bernoulli(self.nu_p)?;
        let sep = separating_observable(&mu, &nu, &self.dictionary)?;
        let mut out = Outcome::default();

        let mut table = Table::new(
            "separating.csv",
            &["mu", "nu", "dictionary", "index", "observable", "a", "b", "mean_mu", "mean_nu"],
        );
        table.push(row![
            mu,
            nu,
            self.dictionary_name,
            sep.index,
            self.dictionary[sep.index],
            sep.a,
            sep.b,
            expected_value(&mu, &sep.spec)?,
            expected_value(&nu, &sep.spec)?
        ]);
        out.tables.push(table);
        if let (Some(a), Some(b)) = (self.expected_a, self.expected_b) {
            out.checks.push(Check::new(
                "separating coefficients",
                sep.a == a && sep.b == b,
                format!("a = {}, b = {} (expected {a}, {b})", sep.a, sep.b),
            ));
        }

        let phi = sep.spec.bind(&FullShift)?;
        let cocycle = Cocycle::new(&FullShift, &phi);
        let s = self.max_shift as i64;
        let rows = (0..self.splices as u64)
            .into_par_iter()
            .map(|i| {
                let splice_seed = seed.wrapping_add(i);
                let x = splice(
                    &WordSource::Bernoulli {
                        p: self.nu_p,
                        seed: splice_seed,
                    },
                    &WordSource::Bernoulli {
                        p: self.mu_p,
                        seed: splice_seed,
                    },
                    self.half_length,
                )?;
                let report = match heteroclinic_peak_check(&x, &mu, &nu, &self.dictionary, &self.opts)
                {
                    Ok(r) => r,
                    Err(Error::Uncertified { .. }) => return Ok((splice_seed, None, 0)),
                    Err(e) => return Err(e),
                };
                let base = cocycle.section(&x, &self.opts)?;
                let mut same = 0;
                for k in -s..=s {
                    let y = FullShift.iterate(&x, k);
                    match cocycle.section(&y, &self.opts) {
                        Ok(sec) if sec.point == base.point && sec.n_f == base.n_f - k => same += 1,
                        Ok(_) | Err(Error::Uncertified { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                Ok((splice_seed, Some(report), same))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut table = Table::new(
            "heteroclinic.csv",
            &[
                "splice",
                "seed",
                "certified",
                "n_f",
                "phi_max",
                "junction",
                "tail_max",
                "forward_slope",
                "backward_slope",
                "shifts",
                "shifts_same_pi",
                "pass",
            ],
        );
        let shifts = 2 * self.max_shift + 1;
        let mut failures = 0;
        for (i, (splice_seed, report, same)) in rows.iter().enumerate() {
            let pass = report.as_ref().is_some_and(|r| r.tail_max < 0.0) && *same == shifts;
            failures += usize::from(!pass);
            match report {
                Some(r) => table.push(row![
                    i,
                    splice_seed,
                    true,
                    r.profile.n_f,
                    r.profile.phi_max,
                    r.junction,
                    r.tail_max,
                    r.profile.forward.slope,
                    r.profile.backward.slope,
                    shifts,
                    same,
                    pass
                ]),
                None => table.push(row![i, splice_seed, false, "", "", "", "", "", "", shifts, same, pass]),
            }
        }
        out.tables.push(table);
        out.checks.push(Check::new(
            "heteroclinic splices",
            failures == 0,
            format!(
                "{} splices (L = {}, N = {}, drift window {}), {failures} failing: each needs a certificate, φ_n < 0 for drift window ≤ |n| ≤ N, and one π-image over |k| ≤ {}",
                self.splices, self.half_length, self.opts.horizon, self.opts.drift_window, self.max_shift
            ),
        ));

        if self.obstruction_samples > 0 {
            let report = ergodic_obstruction_demo(
                &mu,
                &self.dictionary,
                self.obstruction_samples,
                self.obstruction_length,
                self.obstruction_tol,
                seed,
            )?;
            let mut table = Table::new("obstruction.csv", &["index", "max_deviation", "within_tol"]);
            for (i, d) in report.max_deviation.iter().enumerate() {
                table.push(row![i, d, *d <= report.tol]);
            }
            out.tables.push(table);
            out.checks.push(Check::new(
                "typical points see no peak",
                report.fraction >= self.obstruction_min_fraction,
                format!(
                    "fraction {} of {} µ-typical points with averages within {} (need {})",
                    report.fraction, self.obstruction_samples, report.tol, self.obstruction_min_fraction
                ),
            ));
        }
        Ok(out)
    }
}
