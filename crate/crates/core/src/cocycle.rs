//! Additive cocycles `φ_n` over a homeomorphism, their peaks, the last peak
//! time `n_f`, the section `π(x) = f^{n_f(x)} x`, and fundamental domains of
//! the finite-peak set.
//!
//! The peak value is a supremum over all of ℤ. Here it is taken over a
//! window `[-N, N]` and accepted only when both tails drift linearly
//! downward with no new maximum in the last `drift_window` steps (a
//! [`Certificate::Certified`] profile). Everything else is reported as
//! [`Certificate::Uncertified`], which is a value and not an error.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::stats::least_squares;
use crate::systems::{orbit, DynamicalSystem};

/// Largest `|n|` a cocycle will be evaluated at unless overridden.
pub const DEFAULT_HORIZON_CAP: u64 = 1 << 22;

/// Cocycle `{φ_n}` generated by an observable along the orbits of a system.
pub struct Cocycle<'a, S, O> {
    sys: &'a S,
    phi: &'a O,
    cap: u64,
}

impl<'a, S, O> Cocycle<'a, S, O>
where
    S: DynamicalSystem,
    O: Observable<S::Point>,
{
    pub fn new(sys: &'a S, phi: &'a O) -> Self {
        Self {
            sys,
            phi,
            cap: DEFAULT_HORIZON_CAP,
        }
    }

    pub fn with_horizon_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn system(&self) -> &'a S {
        self.sys
    }

    pub fn observable(&self) -> &'a O {
        self.phi
    }

    fn check_cap(&self, n: u64) -> Result<()> {
        if n > self.cap {
            Err(Error::HorizonCap {
                requested: n,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// `φ_n(x)`: `φ(x)+…+φ(f^{n-1}x)` for `n ≥ 0` and
    /// `−φ(f^n x)−…−φ(f^{-1}x)` for `n < 0`.
    pub fn eval(&self, x: &S::Point, n: i64) -> Result<f64> {
        self.check_cap(n.unsigned_abs())?;
        let mut acc = 0.0;
        let mut y = x.clone();
        if n >= 0 {
            for _ in 0..n {
                acc += self.phi.value(&y);
                y = self.sys.apply(&y);
            }
        } else {
            for _ in 0..n.unsigned_abs() {
                y = self.sys.inverse(&y);
                acc -= self.phi.value(&y);
            }
        }
        Ok(acc)
    }

    /// `φ_n(x)` for all `|n| ≤ horizon`, accumulated outward from `n = 0`
    /// with `φ_{n+1} = φ_n + φ(f^n x)`. Uses `2·horizon` map applications
    /// and agrees bitwise with [`Cocycle::eval`].
    pub fn table(&self, x: &S::Point, horizon: usize) -> Result<CocycleTable> {
        self.check_cap(horizon as u64)?;
        let mut values = vec![0.0; 2 * horizon + 1];
        let mut acc = 0.0;
        let mut y = x.clone();
        for n in 0..horizon {
            acc += self.phi.value(&y);
            y = self.sys.apply(&y);
            values[horizon + n + 1] = acc;
        }
        acc = 0.0;
        y = x.clone();
        for n in 0..horizon {
            y = self.sys.inverse(&y);
            acc -= self.phi.value(&y);
            values[horizon - n - 1] = acc;
        }
        Ok(CocycleTable { horizon, values })
    }

    pub fn peak_profile(&self, x: &S::Point, opts: &PeakOptions) -> Result<PeakProfile> {
        opts.validate()?;
        let table = self.table(x, opts.horizon)?;
        Ok(PeakProfile::from_table(&table, opts))
    }

    /// Last peak time and `π(x) = f^{n_f(x)} x`; rejects uncertified points.
    pub fn section(&self, x: &S::Point, opts: &PeakOptions) -> Result<Section<S::Point>> {
        let profile = self.peak_profile(x, opts)?;
        if let Certificate::Uncertified(reason) = &profile.certificate {
            return Err(Error::Uncertified {
                reason: reason.to_string(),
            });
        }
        let point = self.sys.iterate(x, profile.n_f);
        Ok(Section {
            n_f: profile.n_f,
            point,
            profile,
        })
    }

    /// `|Φ(x) − Φ(f^k x) − φ_k(x)|` with both peak values certified.
    pub fn shift_relation_residual(
        &self,
        x: &S::Point,
        k: i64,
        opts: &PeakOptions,
    ) -> Result<f64> {
        let here = self.section(x, opts)?;
        let moved = self.section(&self.sys.iterate(x, k), opts)?;
        let phi_k = self.eval(x, k)?;
        Ok((here.profile.phi_max - moved.profile.phi_max - phi_k).abs())
    }

    /// For each sample point, counts the `k ∈ [-k_max, k_max]` with
    /// `f^k x ∈ W = {y certified : n_f(y) = 0}` by a direct orbit scan.
    pub fn fundamental_domain_test(
        &self,
        sample: &[S::Point],
        opts: &PeakOptions,
        k_max: usize,
    ) -> Result<FundamentalDomainReport>
    where
        O: Sync,
    {
        opts.validate()?;
        let k = k_max as i64;
        let rows = sample
            .par_iter()
            .map(|x| {
                let profile = self.peak_profile(x, opts)?;
                if let Certificate::Uncertified(reason) = &profile.certificate {
                    return Err(Error::Uncertified {
                        reason: format!("sample point {x:?}: {reason}"),
                    });
                }
                let mut hits = Vec::new();
                for (i, y) in orbit(self.sys, x, -k, k)?.iter().enumerate() {
                    let p = self.peak_profile(y, opts)?;
                    if p.is_certified() && p.n_f == 0 {
                        hits.push(i as i64 - k);
                    }
                }
                Ok(FundamentalDomainRow {
                    n_f: profile.n_f,
                    hit_times: hits,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FundamentalDomainReport { k_max, rows })
    }
}

/// `φ_n(x)` for `n ∈ [-N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleTable {
    horizon: usize,
    values: Vec<f64>,
}

impl CocycleTable {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, n: i64) -> Option<f64> {
        let idx = n + self.horizon as i64;
        if idx < 0 {
            return None;
        }
        self.values.get(idx as usize).copied()
    }

    /// Values in index order `-N..=N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let h = self.horizon as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (i as i64 - h, *v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    pub horizon: usize,
    /// Relative tie tolerance; the absolute tolerance is
    /// `tie_tol · max(1, |Φ|)`.
    pub tie_tol: f64,
    pub drift_window: usize,
    /// Smallest accepted tail decay rate `λ_min`.
    pub min_decay: f64,
}

impl PeakOptions {
    pub fn new(horizon: usize) -> Self {
        Self {
            horizon,
            tie_tol: 1e-9,
            drift_window: (horizon / 4).max(1),
            min_decay: 1e-3,
        }
    }

    /// Exact ties, for integer- or dyadic-valued observables on the shift.
    pub fn exact(mut self) -> Self {
        self.tie_tol = 0.0;
        self
    }

    pub fn with_drift_window(mut self, w: usize) -> Self {
        self.drift_window = w;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.drift_window == 0 || self.drift_window > self.horizon {
            return Err(Error::InvalidArgument(format!(
                "need horizon ≥ drift_window ≥ 1, got horizon {} and drift window {}",
                self.horizon, self.drift_window
            )));
        }
        if !(self.tie_tol >= 0.0) || !(self.min_decay > 0.0) {
            return Err(Error::InvalidArgument(
                "tie tolerance must be ≥ 0 and minimum decay > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Forward,
    Backward,
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tail::Forward => "forward",
            Tail::Backward => "backward",
        })
    }
}

/// Least-squares behaviour of `t ↦ φ_{±t}` on the last drift window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub tail: Tail,
    pub slope: f64,
    /// Some value in the window comes within the tie tolerance of `Φ`.
    pub touches_max: bool,
    /// Common step `φ_{±t} − φ_{±(t-1)}` when all steps in the window agree.
    pub constant_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UncertifiedReason {
    /// The observable is constant along the orbit in both tails.
    ConstantCocycle { step: f64 },
    TailNotDecaying { tail: Tail, slope: f64 },
    RunningMaxInTail { tail: Tail },
}

impl fmt::Display for UncertifiedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UncertifiedReason::ConstantCocycle { step } => {
                write!(f, "constant cocycle tails (step {step})")
            }
            UncertifiedReason::TailNotDecaying { tail, slope } => {
                write!(f, "{tail} tail not decaying (slope {slope})")
            }
            UncertifiedReason::RunningMaxInTail { tail } => {
                write!(f, "running maximum still changing in the {tail} tail")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `φ_n ≤ Φ − decay_rate·(|n| − onset)` for all `onset < |n| ≤ N`.
    Certified { decay_rate: f64, onset: usize },
    Uncertified(UncertifiedReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakProfile {
    /// `max_{|n| ≤ N} φ_n(x)`.
    pub phi_max: f64,
    /// All `n` with `φ_n` within the tie tolerance of the maximum, sorted.
    pub peak_times: Vec<i64>,
    /// Last peak time.
    pub n_f: i64,
    pub horizon: usize,
    /// Absolute tie tolerance actually used.
    pub tie_tol: f64,
    pub certificate: Certificate,
    pub forward: TailFit,
    pub backward: TailFit,
}

impl PeakProfile {
    pub fn from_table(table: &CocycleTable, opts: &PeakOptions) -> Self {
        let n = table.horizon() as i64;
        let w = opts.drift_window.min(table.horizon()) as i64;
        let phi_max = table
            .values()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let tol = opts.tie_tol * phi_max.abs().max(1.0);
        let peak_times: Vec<i64> = table
            .iter()
            .filter(|(_, v)| *v >= phi_max - tol)
            .map(|(i, _)| i)
            .collect();
        let n_f = *peak_times.last().expect("maximum is attained");

        let tail_fit = |tail: Tail| {
            let sign = if tail == Tail::Forward { 1 } else { -1 };
            let ts: Vec<f64> = (n - w..=n).map(|t| t as f64).collect();
            let ys: Vec<f64> = (n - w..=n)
                .map(|t| table.get(sign * t).expect("in range"))
                .collect();
            let slope = match least_squares(&ts, &ys) {
                Some(fit) => fit.slope,
                None => 0.0,
            };
            let touches_max = ys[1..].iter().any(|&v| v >= phi_max - tol);
            let steps: Vec<f64> = ys.windows(2).map(|p| p[1] - p[0]).collect();
            let first = steps[0];
            let constant_step = steps
                .iter()
                .all(|s| (s - first).abs() <= tol)
                .then_some(first);
            TailFit {
                tail,
                slope,
                touches_max,
                constant_step,
            }
        };
        let forward = tail_fit(Tail::Forward);
        let backward = tail_fit(Tail::Backward);

        let certificate = Self::certify(table, opts, phi_max, tol, &forward, &backward);
        Self {
            phi_max,
            peak_times,
            n_f,
            horizon: table.horizon(),
            tie_tol: tol,
            certificate,
            forward,
            backward,
        }
    }

    fn certify(
        table: &CocycleTable,
        opts: &PeakOptions,
        phi_max: f64,
        tol: f64,
        forward: &TailFit,
        backward: &TailFit,
    ) -> Certificate {
        // forward steps are φ(f^n x), backward steps are −φ(f^{-n} x)
        if let (Some(a), Some(b)) = (forward.constant_step, backward.constant_step) {
            if (a + b).abs() <= tol {
                return Certificate::Uncertified(UncertifiedReason::ConstantCocycle { step: a });
            }
        }
        for fit in [forward, backward] {
            if fit.slope > -opts.min_decay {
                return Certificate::Uncertified(UncertifiedReason::TailNotDecaying {
                    tail: fit.tail,
                    slope: fit.slope,
                });
            }
        }
        for fit in [forward, backward] {
            if fit.touches_max {
                return Certificate::Uncertified(UncertifiedReason::RunningMaxInTail {
                    tail: fit.tail,
                });
            }
        }
        let decay_rate = (-forward.slope).min(-backward.slope);
        // smallest onset for which the linear envelope holds on the window
        let onset = table
            .iter()
            .map(|(i, v)| i.unsigned_abs() as f64 - (phi_max - v) / decay_rate)
            .fold(0.0f64, f64::max)
            .ceil() as usize;
        Certificate::Certified {
            decay_rate,
            onset: onset.min(table.horizon()),
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.certificate, Certificate::Certified { .. })
    }

    pub fn uncertified_reason(&self) -> Option<&UncertifiedReason> {
        match &self.certificate {
            Certificate::Uncertified(r) => Some(r),
            Certificate::Certified { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Section<P> {
    pub n_f: i64,
    /// `π(x) = f^{n_f(x)} x`.
    pub point: P,
    pub profile: PeakProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalDomainRow {
    pub n_f: i64,
    /// Times `k` with `f^k x` in the computed domain.
    pub hit_times: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalDomainReport {
    pub k_max: usize,
    pub rows: Vec<FundamentalDomainRow>,
}

impl FundamentalDomainReport {
    pub fn counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.hit_times.len())
    }

    pub fn all_hit_once(&self) -> bool {
        self.counts().all(|c| c == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observable::ObservableSpec;
    use crate::systems::{FullShift, NorthSouth, NsPoint, ShiftPoint};

    fn sign() -> ObservableSpec {
        ObservableSpec::symbol_sign()
    }

    #[test]
    fn phi_zero_is_zero() {
        let spec = ObservableSpec::LogJacobian;
        let phi = spec.bind(&NorthSouth).unwrap();
        let c = Cocycle::new(&NorthSouth, &phi);
        assert_eq!(c.eval(&NsPoint::new(0.3).unwrap(), 0).unwrap(), 0.0);
    }

    #[test]
    fn single_term_is_log_jacobian() {
        let spec = ObservableSpec::LogJacobian;
        let phi = spec.bind(&NorthSouth).unwrap();
        let c = Cocycle::new(&NorthSouth, &phi);
        let v = c.eval(&NsPoint::new(0.5).unwrap(), 1).unwrap();
        assert!((v - (8.0f64 / 9.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn spike_partial_sums_by_hand() {
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi);
        let x = ShiftPoint::spike();
        // oracle: sum coordinates directly
        let direct = |n: i64| -> f64 {
            if n >= 0 {
                (0..n).map(|i| 2.0 * x.coordinate(i) as f64 - 1.0).sum()
            } else {
                -(n..0).map(|i| 2.0 * x.coordinate(i) as f64 - 1.0).sum::<f64>()
            }
        };
        assert_eq!(c.eval(&x, 3).unwrap(), -3.0);
        assert_eq!(c.eval(&x, -3).unwrap(), -3.0);
        for n in -20..=20 {
            assert_eq!(c.eval(&x, n).unwrap(), direct(n));
        }
    }

    #[test]
    fn horizon_cap_is_enforced() {
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi).with_horizon_cap(10);
        let x = ShiftPoint::spike();
        assert!(c.eval(&x, 10).is_ok());
        assert!(matches!(c.eval(&x, -11), Err(Error::HorizonCap { .. })));
        assert!(c.table(&x, 11).is_err());
    }

    #[test]
    fn table_matches_eval_bitwise() {
        let spec = ObservableSpec::LogJacobian;
        let phi = spec.bind(&NorthSouth).unwrap();
        let c = Cocycle::new(&NorthSouth, &phi);
        let x = NsPoint::new(0.37).unwrap();
        let t = c.table(&x, 25).unwrap();
        for (n, v) in t.iter() {
            assert_eq!(v, c.eval(&x, n).unwrap());
        }
        assert_eq!(t.get(0), Some(0.0));
        assert_eq!(t.get(26), None);
    }

    #[test]
    fn constant_observable_is_linear() {
        let spec = ObservableSpec::Constant(0.25);
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi);
        let t = c.table(&ShiftPoint::spike(), 12).unwrap();
        for (n, v) in t.iter() {
            assert_eq!(v, 0.25 * n as f64);
        }
    }

    #[test]
    fn ns_table_matches_chain_rule_product() {
        let spec = ObservableSpec::LogJacobian;
        let phi = spec.bind(&NorthSouth).unwrap();
        let c = Cocycle::new(&NorthSouth, &phi);
        let t = c.table(&NsPoint::new(0.5).unwrap(), 30).unwrap();
        // oracle: (g^n)'(1/2) = Π g'(1/(2^k+1)) for k < n, g'(u) = 2/(2-u)^2
        for n in 0..=30 {
            let prod: f64 = (0..n)
                .map(|k| {
                    let u = 1.0 / (2f64.powi(k) + 1.0);
                    2.0 / ((2.0 - u) * (2.0 - u))
                })
                .product();
            assert!((t.get(n as i64).unwrap() - prod.ln()).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn spike_profile_is_certified_at_zero() {
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi);
        let p = c
            .peak_profile(&ShiftPoint::spike(), &PeakOptions::new(50).exact())
            .unwrap();
        assert_eq!(p.phi_max, 0.0);
        assert_eq!(p.peak_times, vec![0]);
        assert_eq!(p.n_f, 0);
        match p.certificate {
            Certificate::Certified { decay_rate, onset } => {
                assert!((decay_rate - 1.0).abs() < 1e-12);
                assert_eq!(onset, 0);
            }
            other => panic!("expected certified, got {other:?}"),
        }
    }

    #[test]
    fn constant_observable_is_uncertified() {
        for c0 in [0.0, 1.0, -2.5] {
            let spec = ObservableSpec::Constant(c0);
            let phi = spec.bind(&FullShift).unwrap();
            let c = Cocycle::new(&FullShift, &phi);
            let p = c
                .peak_profile(&ShiftPoint::spike(), &PeakOptions::new(40))
                .unwrap();
            let reason = p.uncertified_reason().expect("uncertified").to_string();
            assert!(reason.starts_with("constant cocycle tails"), "{reason}");
        }
    }

    #[test]
    fn ns_half_profile_survives_horizon_doubling() {
        let spec = ObservableSpec::LogJacobian;
        let phi = spec.bind(&NorthSouth).unwrap();
        let c = Cocycle::new(&NorthSouth, &phi);
        let x = NsPoint::new(0.5).unwrap();
        let p = c.peak_profile(&x, &PeakOptions::new(60)).unwrap();
        assert!(p.is_certified());
        let q = c.peak_profile(&x, &PeakOptions::new(120)).unwrap();
        assert_eq!(p.peak_times, q.peak_times);
        assert_eq!(p.peak_times, vec![0]);
    }

    #[test]
    fn section_of_shifted_spike() {
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi);
        let opts = PeakOptions::new(50).exact();
        let x = ShiftPoint::spike();
        let s = c.section(&x, &opts).unwrap();
        assert_eq!(s.n_f, 0);
        assert_eq!(s.point, x);
        let y = FullShift.iterate(&x, 3);
        let t = c.section(&y, &opts).unwrap();
        assert_eq!(t.n_f, -3);
        assert_eq!(t.point, x);
        let again = c.section(&t.point, &opts).unwrap();
        assert_eq!(again.point, t.point);
    }

    #[test]
    fn section_rejects_uncertified() {
        let spec = ObservableSpec::Constant(0.0);
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi);
        assert!(matches!(
            c.section(&ShiftPoint::spike(), &PeakOptions::new(20)),
            Err(Error::Uncertified { .. })
        ));
    }

    #[test]
    fn shift_relation_residuals() {
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi);
        let opts = PeakOptions::new(50).exact();
        assert_eq!(c.shift_relation_residual(&ShiftPoint::spike(), 3, &opts).unwrap(), 0.0);
        assert_eq!(c.shift_relation_residual(&ShiftPoint::spike(), 0, &opts).unwrap(), 0.0);

        let spec = ObservableSpec::LogJacobian;
        let phi = spec.bind(&NorthSouth).unwrap();
        let c = Cocycle::new(&NorthSouth, &phi);
        let x = NsPoint::new(0.5).unwrap();
        let r = c.shift_relation_residual(&x, 1, &PeakOptions::new(60)).unwrap();
        assert!(r <= 1e-9);
        // oracle: extended-horizon peak values, Φ(1/2) = 0 and Φ(1/3) = -log(8/9)
        let big = PeakOptions::new(200);
        let a = c.peak_profile(&x, &big).unwrap().phi_max;
        let b = c
            .peak_profile(&NorthSouth.apply(&x), &big)
            .unwrap()
            .phi_max;
        assert!((a - 0.0).abs() < 1e-12);
        assert!((b + (8.0f64 / 9.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn spike_family_hits_domain_at_zero_only() {
        let spec = sign();
        let phi = spec.bind(&FullShift).unwrap();
        let c = Cocycle::new(&FullShift, &phi);
        let opts = PeakOptions::new(40).exact();
        let family: Vec<ShiftPoint> = (-5..=5)
            .map(|j| FullShift.iterate(&ShiftPoint::spike(), j))
            .collect();
        let report = c.fundamental_domain_test(&family, &opts, 8).unwrap();
        for (j, row) in (-5..=5).zip(&report.rows) {
            assert_eq!(row.n_f, -j);
            assert_eq!(row.hit_times, vec![-j]);
        }
    }

    #[test]
    fn drift_window_must_fit_horizon() {
        let opts = PeakOptions::new(10).with_drift_window(11);
        assert!(opts.validate().is_err());
        assert!(PeakOptions::new(10).with_drift_window(0).validate().is_err());
    }
}
