//! The fundamental domain `W = {n_f = 0}` of `φ = log J` on the
//! North–South map, and the annulus `[r, g^{-1} r)` as an exact stand-in.

use peakdomain_core::hopf::{parse_rational, wandering_check, NsInterval, Region};
use peakdomain_core::systems::orbit;
use peakdomain_core::{
    Cocycle, NorthSouth, NsPoint, ObservableSpec, PeakOptions, Result, SystemKind,
};
use rayon::prelude::*;

use super::systems;
use crate::config::{ConfigError, ConfigResult, Reader};
use crate::report::{Check, Outcome, Table};
use crate::row;

#[derive(Debug, Clone)]
pub struct Params {
    horizon: usize,
    samples: usize,
    grid_lo: f64,
    grid_hi: f64,
    k_max: usize,
    annulus: NsInterval,
    wandering_horizon: usize,
}

impl Params {
    pub fn read(r: &mut Reader) -> ConfigResult<Self> {
        systems(r, "north-south", &[SystemKind::NorthSouth])?;
        let radius = r.string("annulus_radius", "3/10");
        let annulus = parse_rational(&radius)
            .and_then(NsInterval::annulus)
            .map_err(|e| ConfigError(format!("annulus_radius: {e}")))?;
        let p = Self {
            horizon: r.usize_min("horizon", 80, 8)?,
            samples: r.usize_min("samples", 1000, 1)?,
            grid_lo: r.f64_in("grid_lo", 0.01, 0.0, 1.0)?,
            grid_hi: r.f64_in("grid_hi", 0.99, 0.0, 1.0)?,
            k_max: r.usize_min("k_max", 120, 1)?,
            annulus,
            wandering_horizon: r.usize_min("wandering_horizon", 30, 1)?,
        };
        if p.grid_lo >= p.grid_hi {
            return Err(ConfigError("grid_lo must be below grid_hi".into()));
        }
        Ok(p)
    }

    /// Grid strictly inside `(grid_lo, grid_hi)`.
    fn grid(&self) -> Result<Vec<NsPoint>> {
        let step = (self.grid_hi - self.grid_lo) / (self.samples + 1) as f64;
        (1..=self.samples)
            .map(|i| NsPoint::new(self.grid_lo + step * i as f64))
            .collect()
    }

    pub fn run(&self) -> Result<Outcome> {
        let sample = self.grid()?;
        let phi = ObservableSpec::LogJacobian;
        let bound = phi.bind(&NorthSouth)?;
        let cocycle = Cocycle::new(&NorthSouth, &bound);
        let opts = PeakOptions::new(self.horizon);
        let report = cocycle.fundamental_domain_test(&sample, &opts, self.k_max)?;
        let k = self.k_max as i64;
        let annulus_hits = sample
            .par_iter()
            .map(|x| {
                Ok(orbit(&NorthSouth, x, -k, k)?
                    .iter()
                    .filter(|y| self.annulus.contains(y))
                    .count())
            })
            .collect::<Result<Vec<_>>>()?;

        let mut table = Table::new(
            "fundamental_domain.csv",
            &["index", "u", "n_f", "orbit_hits_W", "hit_time", "annulus_hits"],
        );
        for (i, ((x, row), hits)) in sample.iter().zip(&report.rows).zip(&annulus_hits).enumerate() {
            let hit_time = match row.hit_times.as_slice() {
                [t] => t.to_string(),
                _ => String::new(),
            };
            table.push(row![i, x.u(), row.n_f, row.hit_times.len(), hit_time, hits]);
        }

        let cert = wandering_check(&Region::Interval(self.annulus.clone()), self.wandering_horizon)?;
        let mut wandering = Table::new(
            "wandering.csv",
            &["lo", "hi", "horizon", "min_separation", "overlap", "pass"],
        );
        let overlap = cert
            .overlap
            .map(|(i, j)| format!("{i};{j}"))
            .unwrap_or_default();
        wandering.push(row![
            self.annulus.lo,
            self.annulus.hi,
            cert.horizon,
            cert.min_separation,
            overlap,
            cert.pass
        ]);

        let w_bad = report.counts().filter(|&c| c != 1).count();
        let a_bad = annulus_hits.iter().filter(|&&c| c != 1).count();
        let checks = vec![
            Check::new(
                "orbit meets W once",
                w_bad == 0,
                format!(
                    "{} grid points, |k| ≤ {}, {w_bad} orbits not hitting W exactly once",
                    self.samples, self.k_max
                ),
            ),
            Check::new(
                "annulus wanders",
                cert.pass,
                format!(
                    "[{}, {}) disjoint from its images for |k| ≤ {}, min separation {:e}",
                    self.annulus.lo, self.annulus.hi, self.wandering_horizon, cert.min_separation
                ),
            ),
            Check::new(
                "annulus meets orbits once",
                a_bad == 0,
                format!("{a_bad} orbits not hitting the annulus exactly once"),
            ),
        ];
        Ok(Outcome {
            tables: vec![table, wandering],
            checks,
        })
    }
}
