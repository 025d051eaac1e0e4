//! Birkhoff averages, invariant measures given in closed form, separating
//! observables, and heteroclinic splices on the full shift.

use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;

use crate::cocycle::{Cocycle, PeakOptions, PeakProfile};
use crate::error::{Error, Result};
use crate::observable::{decode_word, Observable, ObservableSpec};
use crate::stats::sample_rng;
use crate::systems::{DynamicalSystem, FullShift, ShiftPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// `(1/n)·φ_n(x)` forward, `(1/n)·φ_{-n}(x)` backward.
pub fn birkhoff_average<S, O>(
    sys: &S,
    phi: &O,
    x: &S::Point,
    n: u64,
    direction: Direction,
) -> Result<f64>
where
    S: DynamicalSystem,
    O: Observable<S::Point>,
{
    if n == 0 {
        return Err(Error::InvalidArgument("Birkhoff average needs n ≥ 1".into()));
    }
    let k = n as i64;
    let c = Cocycle::new(sys, phi);
    let sum = match direction {
        Direction::Forward => c.eval(x, k)?,
        Direction::Backward => c.eval(x, -k)?,
    };
    Ok(sum / n as f64)
}

/// Invariant probability measures with closed-form integrals.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// i.i.d. symbols on the 2-shift with `P(x_i = 1) = p`.
    Bernoulli(f64),
    /// Uniform measure on the shift orbit of a periodic point.
    DiracPeriodic(Vec<u8>),
    /// Lebesgue measure on the torus.
    Lebesgue,
}

impl MeasureSpec {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Bernoulli parameter must lie in (0,1), got {p}"
            )));
        }
        Ok(MeasureSpec::Bernoulli(p))
    }

    pub fn dirac_periodic(word: &[u8]) -> Result<Self> {
        if word.is_empty() || word.iter().any(|&s| s > 1) {
            return Err(Error::InvalidArgument(
                "periodic word must be a nonempty binary word".into(),
            ));
        }
        Ok(MeasureSpec::DiracPeriodic(word.to_vec()))
    }

    /// A seeded point that is typical for the measure up to `half_length`
    /// coordinates on each side of the origin.
    pub fn typical_point(&self, half_length: usize, seed: u64) -> Result<ShiftPoint> {
        match self {
            MeasureSpec::Bernoulli(p) => {
                let src = WordSource::Bernoulli { p: *p, seed };
                splice(&src, &src, half_length)
            }
            MeasureSpec::DiracPeriodic(w) => ShiftPoint::periodic(w),
            MeasureSpec::Lebesgue => Err(Error::InvalidArgument(
                "Lebesgue measure has no shift points".into(),
            )),
        }
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Bernoulli(p) => write!(f, "bernoulli({p})"),
            MeasureSpec::DiracPeriodic(w) => {
                let s: String = w.iter().map(|b| char::from(b'0' + b)).collect();
                write!(f, "dirac-periodic({s})")
            }
            MeasureSpec::Lebesgue => write!(f, "lebesgue"),
        }
    }
}

/// `∫ φ dµ` computed as a finite weighted sum.
pub fn expected_value(mu: &MeasureSpec, phi: &ObservableSpec) -> Result<f64> {
    let unsupported = || Error::UnsupportedPair {
        measure: mu.to_string(),
        observable: phi.to_string(),
    };
    match (phi, mu) {
        (ObservableSpec::Constant(c), _) => Ok(*c),
        (
            ObservableSpec::Affine {
                inner,
                scale,
                offset,
            },
            _,
        ) => Ok(scale * expected_value(mu, inner)? + offset),
        (ObservableSpec::ShiftWindow(table), MeasureSpec::Bernoulli(p)) => {
            let len = 2 * table.radius() + 1;
            Ok(table
                .values()
                .iter()
                .enumerate()
                .map(|(code, v)| {
                    let ones = (code as u32).count_ones() as i32;
                    v * p.powi(ones) * (1.0 - p).powi(len as i32 - ones)
                })
                .sum())
        }
        (ObservableSpec::ShiftWindow(_), MeasureSpec::DiracPeriodic(w)) => {
            let x = ShiftPoint::periodic(w)?;
            let sum: f64 = (0..w.len() as i64)
                .map(|s| FullShift.observe(phi, &x.shifted(s)))
                .sum();
            Ok(sum / w.len() as f64)
        }
        (ObservableSpec::TorusTrig(terms), MeasureSpec::Lebesgue) => {
            Ok(terms.iter().map(|t| t.mean()).sum())
        }
        (ObservableSpec::LogJacobian, MeasureSpec::Lebesgue) => Ok(0.0),
        _ => Err(unsupported()),
    }
}

/// `a·φ₀ + b` with `∫ dµ = −1` and `∫ dν = +1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingObservable {
    /// Position of `φ₀` in the dictionary.
    pub index: usize,
    pub a: f64,
    pub b: f64,
    pub spec: ObservableSpec,
}

/// Picks the dictionary element whose integrals under `µ` and `ν` differ
/// most (first one on ties) and normalizes it. The coefficients are solved
/// in exact rational arithmetic and rounded once.
pub fn separating_observable(
    mu: &MeasureSpec,
    nu: &MeasureSpec,
    dictionary: &[ObservableSpec],
) -> Result<SeparatingObservable> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, phi) in dictionary.iter().enumerate() {
        let em = expected_value(mu, phi)?;
        let en = expected_value(nu, phi)?;
        let gap = (em - en).abs();
        if best.is_none_or(|(_, bm, bn)| gap > (bm - bn).abs()) {
            best = Some((i, em, en));
        }
    }
    let (index, em, en) = best.ok_or(Error::Indistinguishable)?;
    if (em - en).abs() <= 1e-12 {
        return Err(Error::Indistinguishable);
    }
    let exact = |v: f64| BigRational::from_float(v).expect("finite expectation");
    let (rm, rn) = (exact(em), exact(en));
    let two = BigRational::from_integer(2.into());
    let ra = &two / (&rn - &rm);
    let rb = -BigRational::from_integer(1.into()) - &ra * &rm;
    let a = ra.to_f64().expect("finite");
    let b = rb.to_f64().expect("finite");
    Ok(SeparatingObservable {
        index,
        a,
        b,
        spec: ObservableSpec::affine(dictionary[index].clone(), a, b),
    })
}

/// Source of symbols for one side of a splice.
#[derive(Debug, Clone, PartialEq)]
pub enum WordSource {
    Periodic(Vec<u8>),
    Bernoulli { p: f64, seed: u64 },
}

impl WordSource {
    /// `len` symbols from random stream `stream` (periodic sources ignore both).
    fn draw(&self, len: usize, stream: u64) -> Result<Vec<u8>> {
        match self {
            WordSource::Periodic(w) => {
                if w.is_empty() || w.iter().any(|&s| s > 1) {
                    return Err(Error::InvalidArgument(
                        "periodic source needs a nonempty binary word".into(),
                    ));
                }
                Ok(w.clone())
            }
            WordSource::Bernoulli { p, seed } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "Bernoulli parameter must lie in (0,1), got {p}"
                    )));
                }
                let mut rng = sample_rng(*seed, stream);
                Ok((0..len.max(1))
                    .map(|_| u8::from(rng.gen_bool(*p)))
                    .collect())
            }
        }
    }
}

/// Coordinates `[-L, -1]` from `past`, `[0, L-1]` from `future`, each block
/// repeated periodically outward. Periodic sources contribute their own
/// word as the period, aligned so that `x_n = word[n mod |word|]`.
pub fn splice(past: &WordSource, future: &WordSource, half_length: usize) -> Result<ShiftPoint> {
    let left = match past {
        WordSource::Periodic(_) => past.draw(half_length, 2)?,
        WordSource::Bernoulli { .. } => {
            // draws s_0, s_1, … are x_{-1}, x_{-2}, …
            let mut s = past.draw(half_length, 2)?;
            s.reverse();
            s
        }
    };
    let right = future.draw(half_length, 1)?;
    ShiftPoint::new(&left, &[], &right, 0)
}

/// Running sums of dictionary observables along an orbit segment.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalAverage {
    pub n: u64,
    pub direction: Direction,
    /// `φ_n(x)` (forward) or `φ_{-n}(x)` (backward) per dictionary entry.
    pub sums: Vec<f64>,
}

impl EmpiricalAverage {
    /// One pass over the orbit: histogram of window codes, then one dot
    /// product per observable. Only window observables on the shift.
    pub fn compute(
        x: &ShiftPoint,
        n: u64,
        direction: Direction,
        dictionary: &[ObservableSpec],
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("empirical average needs n ≥ 1".into()));
        }
        let mut radius = 0usize;
        for phi in dictionary {
            radius = radius.max(window_radius(phi).ok_or_else(|| {
                Error::UnsupportedObservable {
                    observable: phi.to_string(),
                    system: crate::systems::SystemKind::Shift,
                }
            })?);
        }
        let r = radius as i64;
        let len = 2 * radius + 1;
        let (first, last) = match direction {
            Direction::Forward => (0, n as i64 - 1),
            Direction::Backward => (-(n as i64), -1),
        };
        let coords = x.window(first - r, last + r);
        let mask = (1u64 << len) - 1;
        let mut hist = vec![0u64; 1 << len];
        let mut code = 0u64;
        for (i, &s) in coords.iter().enumerate() {
            code = ((code << 1) | s as u64) & mask;
            if i + 1 >= len {
                hist[code as usize] += 1;
            }
        }
        let sign = match direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        let sums = dictionary
            .iter()
            .map(|phi| {
                let mut acc = 0.0;
                for (c, &count) in hist.iter().enumerate() {
                    if count > 0 {
                        let w = decode_word(c as u32, len);
                        let p = ShiftPoint::new(&[0], &w, &[0], -r).expect("binary word");
                        acc += count as f64 * FullShift.observe(phi, &p);
                    }
                }
                sign * acc
            })
            .collect();
        Ok(Self {
            n,
            direction,
            sums,
        })
    }

    /// `(1/n)·φ_{±n}(x)` per observable.
    pub fn averages(&self) -> Vec<f64> {
        self.sums.iter().map(|s| s / self.n as f64).collect()
    }
}

fn window_radius(phi: &ObservableSpec) -> Option<usize> {
    match phi {
        ObservableSpec::ShiftWindow(t) => Some(t.radius()),
        ObservableSpec::Constant(_) => Some(0),
        ObservableSpec::Affine { inner, .. } => window_radius(inner),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeteroclinicReport {
    pub separating: SeparatingObservable,
    pub profile: PeakProfile,
    /// Smallest `J` with `φ_n(x) < 0` for all `J ≤ |n| ≤ N`.
    pub junction: usize,
    /// `max φ_n(x)` over `drift_window ≤ |n| ≤ N`.
    pub tail_max: f64,
}

/// Builds the separating observable for `(µ, ν)` and profiles its cocycle
/// at a spliced point. An uncertified profile is an error here.
pub fn heteroclinic_peak_check(
    x: &ShiftPoint,
    mu: &MeasureSpec,
    nu: &MeasureSpec,
    dictionary: &[ObservableSpec],
    opts: &PeakOptions,
) -> Result<HeteroclinicReport> {
    opts.validate()?;
    let separating = separating_observable(mu, nu, dictionary)?;
    let phi = separating.spec.bind(&FullShift)?;
    let table = Cocycle::new(&FullShift, &phi).table(x, opts.horizon)?;
    let profile = PeakProfile::from_table(&table, opts);
    if let Some(reason) = profile.uncertified_reason() {
        return Err(Error::Uncertified {
            reason: format!(
                "{reason}; forward slope {}, backward slope {}",
                profile.forward.slope, profile.backward.slope
            ),
        });
    }
    let mut junction = opts.horizon + 1;
    for j in (1..=opts.horizon).rev() {
        let n = j as i64;
        if table.get(n).unwrap() < 0.0 && table.get(-n).unwrap() < 0.0 {
            junction = j;
        } else {
            break;
        }
    }
    let tail_max = table
        .iter()
        .filter(|(n, _)| n.unsigned_abs() as usize >= opts.drift_window)
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(HeteroclinicReport {
        separating,
        profile,
        junction,
        tail_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    /// Largest deviation `|average − ∫φ dµ|` over the dictionary and both
    /// directions, per sample.
    pub max_deviation: Vec<f64>,
    pub tol: f64,
    pub fraction: f64,
}

/// Fraction of seeded `µ`-typical points whose forward and backward
/// averages of every dictionary observable are within `tol` of `∫φ dµ`.
/// Backward averages use `(1/n)·φ_{-n} → −∫φ dµ`.
pub fn ergodic_obstruction_demo(
    mu: &MeasureSpec,
    dictionary: &[ObservableSpec],
    samples: usize,
    n: u64,
    tol: f64,
    seed: u64,
) -> Result<ObstructionReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let means = dictionary
        .iter()
        .map(|phi| expected_value(mu, phi))
        .collect::<Result<Vec<_>>>()?;
    let half = n as usize + 2 * crate::observable::MAX_WINDOW_RADIUS;
    let max_deviation = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let point_seed: u64 = sample_rng(seed, i).gen();
            let x = mu.typical_point(half, point_seed)?;
            let fwd = EmpiricalAverage::compute(&x, n, Direction::Forward, dictionary)?;
            let bwd = EmpiricalAverage::compute(&x, n, Direction::Backward, dictionary)?;
            let mut dev = 0.0f64;
            for ((f, b), m) in fwd.averages().iter().zip(bwd.averages()).zip(&means) {
                dev = dev.max((f - m).abs()).max((b + m).abs());
            }
            Ok(dev)
        })
        .collect::<Result<Vec<_>>>()?;
    let within = max_deviation.iter().filter(|&&d| d <= tol).count();
    Ok(ObstructionReport {
        fraction: within as f64 / samples as f64,
        max_deviation,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::Certificate;

    fn sign() -> ObservableSpec {
        ObservableSpec::symbol_sign()
    }

    #[test]
    fn alternating_average_vanishes() {
        let x = ShiftPoint::periodic(&[0, 1]).unwrap();
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        for n in [2, 10, 1000] {
            assert_eq!(
                birkhoff_average(&FullShift, &phi, &x, n, Direction::Forward).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn spike_forward_average_is_minus_one() {
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        for n in 1..50 {
            let v = birkhoff_average(&FullShift, &phi, &ShiftPoint::spike(), n, Direction::Forward)
                .unwrap();
            assert_eq!(v, -1.0);
            // past symbols are 1: φ_{-n} = -n
            let w = birkhoff_average(&FullShift, &phi, &ShiftPoint::spike(), n, Direction::Backward)
                .unwrap();
            assert_eq!(w, -1.0);
        }
        assert!(birkhoff_average(&FullShift, &phi, &ShiftPoint::spike(), 0, Direction::Forward)
            .is_err());
    }

    #[test]
    fn bernoulli_average_is_near_p() {
        let spec = ObservableSpec::symbol_indicator();
        let phi = spec.bind(&FullShift).unwrap();
        let x = MeasureSpec::Bernoulli(0.5).typical_point(100_000, 7).unwrap();
        let v = birkhoff_average(&FullShift, &phi, &x, 100_000, Direction::Forward).unwrap();
        assert!((v - 0.5).abs() < 0.01, "{v}");
    }

    #[test]
    fn closed_form_expectations() {
        let ind = ObservableSpec::symbol_indicator();
        assert!((expected_value(&MeasureSpec::Bernoulli(0.3), &ind).unwrap() - 0.3).abs() < 1e-15);
        let v = expected_value(&MeasureSpec::DiracPeriodic(vec![0]), &sign()).unwrap();
        assert_eq!(v, -1.0);
        // y_0 = 1 and y_1 = 1 as a radius-1 window: (x_{-1}, x_0, x_1) = (*, 1, 1)
        let pair = ObservableSpec::ShiftWindow(
            crate::observable::WindowTable::from_fn(1, |w| f64::from(w[1] == 1 && w[2] == 1))
                .unwrap(),
        );
        let v = expected_value(&MeasureSpec::Bernoulli(0.25), &pair).unwrap();
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        let v = expected_value(&MeasureSpec::DiracPeriodic(vec![0, 1, 1]), &pair).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            expected_value(&MeasureSpec::Lebesgue, &ind),
            Err(Error::UnsupportedPair { .. })
        ));
    }

    #[test]
    fn expectation_is_affine() {
        let mu = MeasureSpec::Bernoulli(0.37);
        let base = ObservableSpec::cylinder(&[1, 0, 1]).unwrap();
        let e = expected_value(&mu, &base).unwrap();
        let aff = ObservableSpec::affine(base, -2.5, 0.75);
        assert!((expected_value(&mu, &aff).unwrap() - (-2.5 * e + 0.75)).abs() < 1e-15);
    }

    #[test]
    fn separating_dirac_pair() {
        let mu = MeasureSpec::DiracPeriodic(vec![0]);
        let nu = MeasureSpec::DiracPeriodic(vec![1]);
        let s = separating_observable(&mu, &nu, &[ObservableSpec::symbol_indicator()]).unwrap();
        assert_eq!((s.a, s.b), (2.0, -1.0));
    }

    #[test]
    fn separating_bernoulli_pair_is_exact() {
        let mu = MeasureSpec::Bernoulli(0.5);
        let nu = MeasureSpec::Bernoulli(0.1);
        let s = separating_observable(&mu, &nu, &[ObservableSpec::symbol_indicator()]).unwrap();
        assert_eq!(s.a, -5.0);
        assert_eq!(s.b, 1.5);
        assert!((expected_value(&mu, &s.spec).unwrap() + 1.0).abs() <= 1e-12);
        assert!((expected_value(&nu, &s.spec).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn separating_picks_first_maximizer() {
        let mu = MeasureSpec::Bernoulli(0.5);
        let nu = MeasureSpec::Bernoulli(0.1);
        let dict = ObservableSpec::cylinder_dictionary(2).unwrap();
        let s = separating_observable(&mu, &nu, &dict).unwrap();
        // oracle: brute-force scan of the closed-form gaps
        let gaps: Vec<f64> = dict
            .iter()
            .map(|d| {
                (expected_value(&mu, d).unwrap() - expected_value(&nu, d).unwrap()).abs()
            })
            .collect();
        let max = gaps.iter().copied().fold(0.0, f64::max);
        assert_eq!(s.index, gaps.iter().position(|&g| g == max).unwrap());
    }

    #[test]
    fn identical_measures_are_indistinguishable() {
        let mu = MeasureSpec::Bernoulli(0.3);
        let dict = ObservableSpec::cylinder_dictionary(1).unwrap();
        assert_eq!(
            separating_observable(&mu, &mu, &dict),
            Err(Error::Indistinguishable)
        );
    }

    #[test]
    fn splice_of_constant_words_is_spike() {
        let x = splice(
            &WordSource::Periodic(vec![1]),
            &WordSource::Periodic(vec![0]),
            17,
        )
        .unwrap();
        assert_eq!(x, ShiftPoint::spike());
    }

    #[test]
    fn bernoulli_splice_frequencies() {
        let past = WordSource::Bernoulli { p: 0.1, seed: 7 };
        let future = WordSource::Bernoulli { p: 0.5, seed: 7 };
        let x = splice(&past, &future, 64).unwrap();
        let ones = |lo, hi| x.window(lo, hi).iter().filter(|&&s| s == 1).count() as f64 / 64.0;
        assert!((ones(-64, -1) - 0.1).abs() <= 0.08);
        assert!((ones(0, 63) - 0.5).abs() <= 0.08);
        // periodic beyond the window
        assert_eq!(x.window(64, 127), x.window(0, 63));
        assert_eq!(x.window(-128, -65), x.window(-64, -1));
    }

    #[test]
    fn zero_length_splice_is_periodic_junction() {
        let past = WordSource::Bernoulli { p: 0.5, seed: 3 };
        let future = WordSource::Periodic(vec![0, 1]);
        let x = splice(&past, &future, 0).unwrap();
        let a = x.coordinate(-1);
        assert!((1..20).all(|i| x.coordinate(-i) == a));
        assert_eq!(x.window(0, 5), vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn empirical_average_matches_cocycle() {
        let x = MeasureSpec::Bernoulli(0.3).typical_point(600, 11).unwrap();
        let dict = ObservableSpec::cylinder_dictionary(1).unwrap();
        for dir in [Direction::Forward, Direction::Backward] {
            let e = EmpiricalAverage::compute(&x, 500, dir, &dict).unwrap();
            for (phi, avg) in dict.iter().zip(e.averages()) {
                let bound = phi.bind(&FullShift).unwrap();
                let direct = birkhoff_average(&FullShift, &bound, &x, 500, dir).unwrap();
                assert!((avg - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spike_heteroclinic_check() {
        let mu = MeasureSpec::DiracPeriodic(vec![0]);
        let nu = MeasureSpec::DiracPeriodic(vec![1]);
        let dict = [ObservableSpec::symbol_indicator()];
        let opts = PeakOptions::new(40).exact();
        let r = heteroclinic_peak_check(&ShiftPoint::spike(), &mu, &nu, &dict, &opts).unwrap();
        assert_eq!(r.profile.n_f, 0);
        assert_eq!(r.junction, 1);
        assert!(matches!(r.profile.certificate, Certificate::Certified { .. }));
        let s = heteroclinic_peak_check(&ShiftPoint::spike().shifted(3), &mu, &nu, &dict, &opts)
            .unwrap();
        assert_eq!(s.profile.n_f, -3);
    }

    #[test]
    fn dirac_obstruction_is_exact() {
        let dict = ObservableSpec::cylinder_dictionary(1).unwrap();
        let mu = MeasureSpec::DiracPeriodic(vec![0, 1, 1]);
        let r = ergodic_obstruction_demo(&mu, &dict, 5, 3000, 1e-9, 1).unwrap();
        assert_eq!(r.fraction, 1.0);
    }

    #[test]
    fn zero_tolerance_obstruction_fails() {
        let dict = ObservableSpec::cylinder_dictionary(1).unwrap();
        let r =
            ergodic_obstruction_demo(&MeasureSpec::Bernoulli(0.5), &dict, 10, 2001, 0.0, 1).unwrap();
        assert_eq!(r.fraction, 0.0);
    }
}
