//! Random checks of the cocycle identity `φ_{n+k}(x) = φ_n(x) + φ_k(f^n x)`.

use std::f64::consts::TAU;

use peakdomain_core::hopf::uniform_torus;
use peakdomain_core::observable::{TrigTerm, WindowTable};
use peakdomain_core::stats::sample_rng;
use peakdomain_core::{
    CatMap, Cocycle, DynamicalSystem, FullShift, NorthSouth, NsPoint, ObservableSpec, Result,
    ShiftPoint, SystemKind,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::systems;
use crate::config::{ConfigResult, Reader};
use crate::report::{Check, Outcome, Table};
use crate::row;

#[derive(Debug, Clone)]
pub struct Params {
    cases: usize,
    max_time: usize,
    tol: f64,
    systems: Vec<SystemKind>,
}

impl Params {
    pub fn read(r: &mut Reader) -> ConfigResult<Self> {
        Ok(Self {
            cases: r.usize_min("cases", 10_000, 1)?,
            max_time: r.usize_min("max_time", 40, 1)?,
            tol: r.positive("tol", 1e-9)?,
            systems: systems(
                r,
                "shift, north-south, cat-map",
                &[SystemKind::Shift, SystemKind::NorthSouth, SystemKind::CatMap],
            )?,
        })
    }

    pub fn run(&self, seed: u64) -> Result<Outcome> {
        let t = self.max_time as i64;
        let cases = (0..self.cases as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed, i);
                let kind = self.systems[rng.gen_range(0..self.systems.len())];
                let n = rng.gen_range(-t..=t);
                let k = rng.gen_range(-t..=t);
                let (spec, lhs, rhs) = match kind {
                    SystemKind::Shift => {
                        let spec = random_window(&mut rng)?;
                        let x = random_shift_point(&mut rng)?;
                        let (l, r) = identity(&FullShift, &spec, &x, n, k)?;
                        (spec, l, r)
                    }
                    SystemKind::NorthSouth => {
                        let spec = random_ns_observable(&mut rng);
                        let x = NsPoint::new(rng.gen::<f64>())?;
                        let (l, r) = identity(&NorthSouth, &spec, &x, n, k)?;
                        (spec, l, r)
                    }
                    SystemKind::CatMap => {
                        let spec = random_trig(&mut rng);
                        let x = uniform_torus(&mut rng);
                        let (l, r) = identity(&CatMap, &spec, &x, n, k)?;
                        (spec, l, r)
                    }
                };
                Ok((kind, spec, n, k, lhs, rhs))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut table = Table::new(
            "cocycle_identity.csv",
            &[
                "index", "system", "observable", "n", "k", "lhs", "rhs", "abs_error", "rel_error",
                "pass",
            ],
        );
        let mut failures = 0;
        let mut worst_rel: f64 = 0.0;
        let mut shift_inexact = 0;
        for (i, (kind, spec, n, k, lhs, rhs)) in cases.iter().enumerate() {
            let abs = (lhs - rhs).abs();
            let rel = abs / lhs.abs().max(rhs.abs()).max(1.0);
            let pass = match kind {
                SystemKind::Shift => lhs == rhs,
                _ => rel <= self.tol,
            };
            if *kind == SystemKind::Shift && lhs != rhs {
                shift_inexact += 1;
            } else if *kind != SystemKind::Shift {
                worst_rel = worst_rel.max(rel);
            }
            failures += usize::from(!pass);
            table.push(row![i, kind.name(), spec, n, k, lhs, rhs, abs, rel, pass]);
        }
        let check = Check::new(
            "cocycle identity",
            failures == 0,
            format!(
                "{} cases, {failures} failures; shift mismatches {shift_inexact}; worst relative error {worst_rel:e} (tol {:e})",
                self.cases, self.tol
            ),
        );
        Ok(Outcome {
            tables: vec![table],
            checks: vec![check],
        })
    }
}

/// `(φ_{n+k}(x), φ_n(x) + φ_k(f^n x))`.
fn identity<S: DynamicalSystem>(
    sys: &S,
    spec: &ObservableSpec,
    x: &S::Point,
    n: i64,
    k: i64,
) -> Result<(f64, f64)> {
    let phi = spec.bind(sys)?;
    let c = Cocycle::new(sys, &phi);
    let lhs = c.eval(x, n + k)?;
    let rhs = c.eval(x, n)? + c.eval(&sys.iterate(x, n), k)?;
    Ok((lhs, rhs))
}

/// Window table with quarter-integer values, so every sum is exact.
fn random_window(rng: &mut ChaCha8Rng) -> Result<ObservableSpec> {
    let radius = rng.gen_range(0..=2);
    let values = (0..1usize << (2 * radius + 1))
        .map(|_| f64::from(rng.gen_range(-8i32..=8)) / 4.0)
        .collect();
    Ok(ObservableSpec::ShiftWindow(WindowTable::new(radius, values)?))
}

fn random_word(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Vec<u8> {
    let len = rng.gen_range(lo..=hi);
    (0..len).map(|_| rng.gen_range(0..=1)).collect()
}

fn random_shift_point(rng: &mut ChaCha8Rng) -> Result<ShiftPoint> {
    let left = random_word(rng, 1, 4);
    let center = random_word(rng, 0, 16);
    let right = random_word(rng, 1, 4);
    ShiftPoint::new(&left, &center, &right, rng.gen_range(-20..=20))
}

fn random_ns_observable(rng: &mut ChaCha8Rng) -> ObservableSpec {
    match rng.gen_range(0..3) {
        0 => ObservableSpec::LogJacobian,
        1 => ObservableSpec::affine(
            ObservableSpec::LogJacobian,
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.0..1.0),
        ),
        _ => ObservableSpec::Constant(rng.gen_range(-1.0..1.0)),
    }
}

fn random_trig(rng: &mut ChaCha8Rng) -> ObservableSpec {
    let terms = (0..rng.gen_range(1..=3))
        .map(|_| TrigTerm {
            amplitude: rng.gen_range(-1.0..1.0),
            kx: rng.gen_range(-3..=3),
            ky: rng.gen_range(-3..=3),
            phase: rng.gen_range(0.0..TAU),
        })
        .collect();
    ObservableSpec::TorusTrig(terms)
}
