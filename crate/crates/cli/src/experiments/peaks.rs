//! Section invariance `π(f^k x) = π(x)`, `n_f(f^k x) = n_f(x) − k` and the
//! shift relation `Φ(x) − Φ(f^k x) = φ_k(x)` on certified points.

use peakdomain_core::stats::sample_rng;
use peakdomain_core::{
    Cocycle, DynamicalSystem, Error, FullShift, NorthSouth, NsPoint, ObservableSpec, PeakOptions,
    Result, ShiftPoint, SystemKind,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::systems;
use crate::config::{ConfigError, ConfigResult, Reader};
use crate::report::{Check, Outcome, Table};
use crate::row;

#[derive(Debug, Clone)]
pub struct Params {
    samples: usize,
    horizon: usize,
    max_shift: usize,
    tol: f64,
    systems: Vec<SystemKind>,
}

struct Row {
    kind: SystemKind,
    k: i64,
    n_f: Option<i64>,
    n_f_shifted: Option<i64>,
    distance: f64,
    residual: f64,
    /// Scale used for the relative residual.
    scale: f64,
}

impl Params {
    pub fn read(r: &mut Reader) -> ConfigResult<Self> {
        let horizon = r.usize_min("horizon", 80, 8)?;
        let p = Self {
            samples: r.usize_min("samples", 1000, 1)?,
            horizon,
            max_shift: r.usize("max_shift", 30)?,
            tol: r.positive("tol", 1e-9)?,
            systems: systems(
                r,
                "north-south, shift",
                &[SystemKind::NorthSouth, SystemKind::Shift],
            )?,
        };
        if p.max_shift >= p.horizon / 2 {
            return Err(ConfigError(format!(
                "max_shift must be below horizon/2 = {}, got {}",
                p.horizon / 2,
                p.max_shift
            )));
        }
        Ok(p)
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let s = self.max_shift as i64;
        let rows = (0..self.samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed, i);
                let kind = self.systems[i as usize % self.systems.len()];
                let k = rng.gen_range(-s..=s);
                match kind {
                    SystemKind::NorthSouth => {
                        let x = NsPoint::new(0.001 + 0.998 * rng.gen::<f64>())?;
                        let opts = PeakOptions::new(self.horizon);
                        let phi = ObservableSpec::LogJacobian;
                        compare(&NorthSouth, &phi, &x, k, &opts)
                    }
                    _ => {
                        let x = drifting_shift_point(&mut rng)?;
                        let opts = PeakOptions::new(self.horizon).exact();
                        compare(&FullShift, &ObservableSpec::symbol_sign(), &x, k, &opts)
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let mut table = Table::new(
            "section_invariance.csv",
            &[
                "index",
                "system",
                "k",
                "n_f",
                "n_f_shifted",
                "pi_distance",
                "residual",
                "certified",
                "pass",
            ],
        );
        let mut failures = 0;
        let mut uncertified = 0;
        let mut worst_distance: f64 = 0.0;
        let mut worst_residual: f64 = 0.0;
        for (i, r) in rows.iter().enumerate() {
            let certified = r.n_f.is_some() && r.n_f_shifted.is_some();
            let exact = r.kind == SystemKind::Shift;
            let pass = certified
                && r.n_f_shifted == r.n_f.map(|n| n - r.k)
                && if exact {
                    r.distance == 0.0 && r.residual == 0.0
                } else {
                    r.distance <= self.tol && r.residual <= self.tol * r.scale
                };
            uncertified += usize::from(!certified);
            failures += usize::from(!pass);
            if certified {
                worst_distance = worst_distance.max(r.distance);
                worst_residual = worst_residual.max(r.residual / r.scale);
            }
            table.push(row![
                i,
                r.kind.name(),
                r.k,
                opt(r.n_f),
                opt(r.n_f_shifted),
                r.distance,
                r.residual,
                certified,
                pass
            ]);
        }
        let check = Check::new(
            "section invariance",
            failures == 0,
            format!(
                "{} points, {failures} failures, {uncertified} uncertified; worst π distance {worst_distance:e}, worst residual {worst_residual:e}",
                self.samples
            ),
        );
        Ok(Outcome {
            tables: vec![table],
            checks: vec![check],
        })
    }
}

fn opt(v: Option<i64>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}

fn compare<S: DynamicalSystem>(
    sys: &S,
    spec: &ObservableSpec,
    x: &S::Point,
    k: i64,
    opts: &PeakOptions,
) -> Result<Row> {
    let phi = spec.bind(sys)?;
    let c = Cocycle::new(sys, &phi);
    let y = sys.iterate(x, k);
    let (here, there) = match (certified(c.section(x, opts))?, certified(c.section(&y, opts))?) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => {
            return Ok(Row {
                kind: sys.kind(),
                k,
                n_f: a.map(|s| s.n_f),
                n_f_shifted: b.map(|s| s.n_f),
                distance: f64::NAN,
                residual: f64::NAN,
                scale: 1.0,
            })
        }
    };
    let phi_k = c.eval(x, k)?;
    let residual = (here.profile.phi_max - there.profile.phi_max - phi_k).abs();
    let scale = here
        .profile
        .phi_max
        .abs()
        .max(there.profile.phi_max.abs())
        .max(1.0);
    Ok(Row {
        kind: sys.kind(),
        k,
        n_f: Some(here.n_f),
        n_f_shifted: Some(there.n_f),
        distance: sys.distance(&here.point, &there.point),
        residual,
        scale,
    })
}

/// Turns an uncertified section into `None`; other errors propagate.
fn certified<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Uncertified { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Word of length 1..=5 with strictly more `majority` symbols.
fn biased_word(rng: &mut ChaCha8Rng, majority: u8) -> Vec<u8> {
    loop {
        let len = rng.gen_range(1..=5);
        let w: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
        let heavy = w.iter().filter(|&&s| s == majority).count();
        if 2 * heavy > len {
            return w;
        }
    }
}

/// Eventually periodic point whose `2·x_0 − 1` cocycle drifts down in both
/// time directions: the past period has more ones, the future more zeros.
fn drifting_shift_point(rng: &mut ChaCha8Rng) -> Result<ShiftPoint> {
    let left = biased_word(rng, 1);
    let right = biased_word(rng, 0);
    let len = rng.gen_range(0..=8);
    let center: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
    ShiftPoint::new(&left, &center, &right, rng.gen_range(-6..=6))
}
