//! Hopf decomposition estimates through the Jacobian cocycle: point
//! classification, Monte Carlo volume of the finite-peak set, wandering
//! intervals and rectangles, the `Σ e^{φ_n}` integral bound, and recurrence
//! statistics for the conservative cat map.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cocycle::{Cocycle, PeakOptions, PeakProfile, UncertifiedReason};
use crate::error::{Error, Result};
use crate::stats::{sample_rng, wilson_interval, Z_95};
use crate::systems::{CatMap, DynamicalSystem, NorthSouth, NsPoint, TorusPoint, TORUS_DIAMETER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HopfClass {
    Dissipative,
    ConservativeSuspect,
    Unknown,
}

impl HopfClass {
    pub fn name(self) -> &'static str {
        match self {
            HopfClass::Dissipative => "dissipative",
            HopfClass::ConservativeSuspect => "conservative-suspect",
            HopfClass::Unknown => "unknown",
        }
    }
}

impl fmt::Display for HopfClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reads a class off a Jacobian-cocycle profile. Flat evidence is a tail
/// with slope below the decay threshold that keeps returning to the
/// maximum, or a cocycle with constant zero steps.
pub fn classify_profile(profile: &PeakProfile, opts: &PeakOptions) -> HopfClass {
    let Some(reason) = profile.uncertified_reason() else {
        return HopfClass::Dissipative;
    };
    let flat = |slope: f64| slope.abs() < opts.min_decay;
    match reason {
        UncertifiedReason::ConstantCocycle { step } if step.abs() < opts.min_decay => {
            HopfClass::ConservativeSuspect
        }
        UncertifiedReason::ConstantCocycle { .. } => HopfClass::Unknown,
        _ => {
            let recurrent = [&profile.forward, &profile.backward]
                .iter()
                .any(|t| flat(t.slope) && t.touches_max);
            if recurrent {
                HopfClass::ConservativeSuspect
            } else {
                HopfClass::Unknown
            }
        }
    }
}

/// Classifies `x` with `φ = log J_f`.
pub fn classify_point<S: DynamicalSystem>(
    sys: &S,
    x: &S::Point,
    opts: &PeakOptions,
) -> Result<HopfClass> {
    Ok(classify_profile(&jacobian_profile(sys, x, opts)?, opts))
}

fn jacobian_profile<S: DynamicalSystem>(
    sys: &S,
    x: &S::Point,
    opts: &PeakOptions,
) -> Result<PeakProfile> {
    if sys.log_jacobian(x).is_none() {
        return Err(Error::NoJacobian { system: sys.kind() });
    }
    let phi = |p: &S::Point| sys.log_jacobian(p).unwrap_or(f64::NAN);
    Cocycle::new(sys, &phi).peak_profile(x, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopfReport {
    pub classes: Vec<HopfClass>,
    pub dissipative: usize,
    pub conservative_suspect: usize,
    /// Excluded from the estimate below.
    pub unknown: usize,
    /// Dissipative share among decided samples.
    pub estimate: f64,
    /// 95% Wilson interval for the estimate.
    pub interval: (f64, f64),
}

impl HopfReport {
    pub fn samples(&self) -> usize {
        self.classes.len()
    }

    /// Lower bound `1 − estimate` for the volume of transitive points.
    pub fn transitivity_lower_bound(&self) -> f64 {
        1.0 - self.estimate
    }

    pub fn interval_width(&self) -> f64 {
        self.interval.1 - self.interval.0
    }
}

/// Classifies the given points in parallel; results keep input order.
pub fn hopf_report<S: DynamicalSystem>(
    sys: &S,
    points: &[S::Point],
    opts: &PeakOptions,
) -> Result<HopfReport> {
    opts.validate()?;
    let classes = points
        .par_iter()
        .map(|x| classify_point(sys, x, opts))
        .collect::<Result<Vec<_>>>()?;
    let count = |c| classes.iter().filter(|&&k| k == c).count();
    let dissipative = count(HopfClass::Dissipative);
    let conservative_suspect = count(HopfClass::ConservativeSuspect);
    let unknown = count(HopfClass::Unknown);
    let decided = (dissipative + conservative_suspect) as u64;
    let estimate = if decided == 0 {
        0.0
    } else {
        dissipative as f64 / decided as f64
    };
    Ok(HopfReport {
        classes,
        dissipative,
        conservative_suspect,
        unknown,
        estimate,
        interval: wilson_interval(dissipative as u64, decided, Z_95),
    })
}

/// Monte Carlo estimate of the volume of the finite-peak set of `log J_f`
/// from `n_samples` points drawn by `sampler`, each from its own stream.
pub fn estimate_h_volume<S, F>(
    sys: &S,
    sampler: F,
    n_samples: usize,
    opts: &PeakOptions,
    seed: u64,
) -> Result<HopfReport>
where
    S: DynamicalSystem,
    F: Fn(&mut ChaCha8Rng) -> S::Point + Sync,
{
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let points: Vec<S::Point> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| sampler(&mut sample_rng(seed, i)))
        .collect();
    hopf_report(sys, &points, opts)
}

/// Uniform point of `[0, 1)` for the North–South map.
pub fn uniform_ns(rng: &mut ChaCha8Rng) -> NsPoint {
    NsPoint::new(rng.gen::<f64>()).expect("in range")
}

const LATTICE_BITS: u32 = 50;

/// Uniform point on the `2^{-50}` lattice of the torus. Cat-map orbits of
/// lattice points are computed without rounding.
pub fn uniform_torus(rng: &mut ChaCha8Rng) -> TorusPoint {
    let scale = (1u64 << LATTICE_BITS) as f64;
    let x = (rng.gen::<u64>() >> (64 - LATTICE_BITS)) as f64 / scale;
    let y = (rng.gen::<u64>() >> (64 - LATTICE_BITS)) as f64 / scale;
    TorusPoint::new(x, y)
}

/// Half-open interval `[lo, hi)` of the North–South interval with exact
/// rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn ns_forward(u: &BigRational) -> BigRational {
    u / (BigRational::from_integer(2.into()) - u)
}

fn ns_backward(u: &BigRational) -> BigRational {
    BigRational::from_integer(2.into()) * u / (BigRational::one() + u)
}

fn ns_iterate(u: &BigRational, k: i64) -> BigRational {
    let mut v = u.clone();
    for _ in 0..k.unsigned_abs() {
        v = if k > 0 { ns_forward(&v) } else { ns_backward(&v) };
    }
    v
}

impl NsInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo.is_negative() || hi > BigRational::one() || lo > hi {
            return Err(Error::InvalidArgument(format!(
                "need 0 ≤ lo ≤ hi ≤ 1, got [{lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Interval with the exact values of two doubles as endpoints.
    pub fn from_f64(lo: f64, hi: f64) -> Result<Self> {
        let conv = |v: f64| {
            BigRational::from_float(v).ok_or(Error::Domain { value: v })
        };
        Self::new(conv(lo)?, conv(hi)?)
    }

    /// `[r, g^{-1}(r))`, the interval model of `B(S,r) \ g B(S,r)`.
    pub fn annulus(r: BigRational) -> Result<Self> {
        if !r.is_positive() || r >= BigRational::one() {
            return Err(Error::InvalidArgument(format!("annulus radius must lie in (0,1), got {r}")));
        }
        let hi = ns_backward(&r);
        Self::new(r, hi)
    }

    /// `g^k [lo, hi) = [g^k lo, g^k hi)` since `g` is increasing.
    pub fn image(&self, k: i64) -> Self {
        Self {
            lo: ns_iterate(&self.lo, k),
            hi: ns_iterate(&self.hi, k),
        }
    }

    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn length_f64(&self) -> f64 {
        self.length().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    /// Exact membership of a point, read through whichever of `u` and
    /// `1 − u` it stores more precisely.
    pub fn contains(&self, p: &NsPoint) -> bool {
        let exact = |v: f64| BigRational::from_float(v).expect("finite coordinate");
        let u = if p.u() <= 0.5 {
            exact(p.u())
        } else {
            BigRational::one() - exact(p.complement())
        };
        self.lo <= u && u < self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }
}

/// Parses `"3/10"`, `"0.3"` or `"1"` into an exact rational. Decimals are
/// read as written, not as the nearest double.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(n, d);
    Ok(if neg { -v } else { v })
}

/// Region tested for wandering.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Interval(NsInterval),
    /// `[x, x+w) × [y, y+h)` on the torus.
    Rectangle { x: f64, y: f64, w: f64, h: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WanderingCertificate {
    pub horizon: usize,
    /// Smallest gap between two checked iterates; negative when some pair
    /// overlaps, `+∞` when no pair was comparable.
    pub min_separation: f64,
    /// First pair `(i, j)` found to intersect.
    pub overlap: Option<(i64, i64)>,
    /// Set when the torus search ran out of budget before finishing.
    pub exhausted: bool,
    pub pass: bool,
}

/// Translate checks allowed for one torus wandering test.
pub const TORUS_BUDGET: u64 = 5_000_000;

/// Checks `f^i W ∩ f^j W = ∅` for `−K ≤ i < j ≤ K`.
pub fn wandering_check(region: &Region, horizon: usize) -> Result<WanderingCertificate> {
    match region {
        Region::Interval(w) => Ok(wandering_interval(w, horizon)),
        Region::Rectangle { x, y, w, h } => wandering_rectangle(*x, *y, *w, *h, horizon),
    }
}

fn wandering_interval(w: &NsInterval, horizon: usize) -> WanderingCertificate {
    let k = horizon as i64;
    let images: Vec<NsInterval> = (-k..=k).map(|i| w.image(i)).collect();
    let mut min_gap: Option<BigRational> = None;
    let mut overlap = None;
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            let (p, q) = (&images[a], &images[b]);
            if p.is_empty() || q.is_empty() {
                continue;
            }
            // gap between two half-open intervals; negative iff they meet
            let gap = if p.lo <= q.lo { &q.lo - &p.hi } else { &p.lo - &q.hi };
            if gap.is_negative() && overlap.is_none() {
                overlap = Some((a as i64 - k, b as i64 - k));
            }
            if min_gap.as_ref().is_none_or(|m| gap < *m) {
                min_gap = Some(gap);
            }
        }
    }
    WanderingCertificate {
        horizon,
        min_separation: min_gap.map_or(f64::INFINITY, |g| g.to_f64().unwrap_or(f64::NAN)),
        pass: overlap.is_none(),
        overlap,
        exhausted: false,
    }
}

/// Separation margin demanded before two torus polygons count as disjoint.
const SEPARATION_MARGIN: f64 = 1e-12;

fn matrix_power(k: usize) -> Option<[[i64; 2]; 2]> {
    let mut m = [[1i64, 0], [0, 1]];
    for _ in 0..k {
        m = [
            [
                m[0][0].checked_mul(2)?.checked_add(m[0][1])?,
                m[0][0].checked_add(m[0][1])?,
            ],
            [
                m[1][0].checked_mul(2)?.checked_add(m[1][1])?,
                m[1][0].checked_add(m[1][1])?,
            ],
        ];
    }
    Some(m)
}

/// Signed gap between two convex polygons along their edge normals;
/// positive means separated by at least that much.
fn polygon_gap(p: &[(f64, f64)], q: &[(f64, f64)]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for poly in [p, q] {
        for i in 0..poly.len() {
            let (x0, y0) = poly[i];
            let (x1, y1) = poly[(i + 1) % poly.len()];
            let (nx, ny) = (y1 - y0, x0 - x1);
            let norm = nx.hypot(ny);
            if norm == 0.0 {
                continue;
            }
            let proj = |poly: &[(f64, f64)]| {
                poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, y)| {
                    let d = (x * nx + y * ny) / norm;
                    (lo.min(d), hi.max(d))
                })
            };
            let (plo, phi) = proj(p);
            let (qlo, qhi) = proj(q);
            best = best.max((qlo - phi).max(plo - qhi));
        }
    }
    best
}

fn wandering_rectangle(x: f64, y: f64, w: f64, h: f64, horizon: usize) -> Result<WanderingCertificate> {
    if !(w > 0.0 && h > 0.0 && w <= 1.0 && h <= 1.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidArgument("rectangle sides must lie in (0,1]".into()));
    }
    let rect = [(x, y), (x + w, y), (x + w, y + h), (x, y + h)];
    let mut budget = TORUS_BUDGET;
    let mut min_gap = f64::INFINITY;
    // A^i R ∩ A^j R ≠ ∅ iff R ∩ A^{j-i} R ≠ ∅
    for k in 1..=2 * horizon {
        let Some(m) = matrix_power(k) else {
            return Ok(exhausted(horizon, min_gap));
        };
        let img: Vec<(f64, f64)> = rect
            .iter()
            .map(|&(px, py)| {
                (
                    m[0][0] as f64 * px + m[0][1] as f64 * py,
                    m[1][0] as f64 * px + m[1][1] as f64 * py,
                )
            })
            .collect();
        let (bx0, bx1) = img.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (by0, by1) = img.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let tx = ((x - bx1).floor() as i64)..=((x + w - bx0).ceil() as i64);
        let ty = ((y - by1).floor() as i64)..=((y + h - by0).ceil() as i64);
        let cost = (tx.end() - tx.start() + 1) as u64 * (ty.end() - ty.start() + 1) as u64;
        if cost > budget {
            return Ok(exhausted(horizon, min_gap));
        }
        budget -= cost;
        for tx in tx.clone() {
            for ty in ty.clone() {
                let moved: Vec<(f64, f64)> =
                    img.iter().map(|&(a, b)| (a + tx as f64, b + ty as f64)).collect();
                let gap = polygon_gap(&rect, &moved);
                min_gap = min_gap.min(gap);
                if gap <= SEPARATION_MARGIN {
                    return Ok(WanderingCertificate {
                        horizon,
                        min_separation: gap,
                        overlap: Some((0, k as i64)),
                        exhausted: false,
                        pass: false,
                    });
                }
            }
        }
    }
    Ok(WanderingCertificate {
        horizon,
        min_separation: min_gap,
        overlap: None,
        exhausted: false,
        pass: true,
    })
}

fn exhausted(horizon: usize, min_gap: f64) -> WanderingCertificate {
    WanderingCertificate {
        horizon,
        min_separation: min_gap,
        overlap: None,
        exhausted: true,
        pass: false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumIntegralReport {
    /// Midpoint-rule value of `∫_W Σ_{|n|≤N} e^{φ_n}`.
    pub value: f64,
    /// `∫_W e^{φ_n}` for `n = −N..=N`.
    pub per_step: Vec<f64>,
    /// `Σ_{|n|≤N} |g^n W|` in exact arithmetic, rounded once.
    pub image_lengths: f64,
    /// Whether the outermost terms are no larger than their neighbours.
    pub tail_decaying: bool,
}

/// Integrates `Σ_{|n|≤N} e^{φ_n}` over a North–South interval with the
/// composite midpoint rule, `φ = log J`.
pub fn sum_integral_check(
    w: &NsInterval,
    horizon: usize,
    quadrature_points: usize,
) -> Result<SumIntegralReport> {
    if quadrature_points == 0 {
        return Err(Error::InvalidArgument("need at least one quadrature point".into()));
    }
    let k = horizon as i64;
    let image_lengths = (-k..=k)
        .map(|i| w.image(i).length())
        .fold(BigRational::zero(), |a, b| a + b)
        .to_f64()
        .unwrap_or(f64::NAN);
    let (lo, hi) = (w.lo_f64(), w.hi_f64());
    let step = (hi - lo) / quadrature_points as f64;
    let phi = |p: &NsPoint| NorthSouth.log_jacobian_at(p);
    let cocycle = Cocycle::new(&NorthSouth, &phi);
    let rows = (0..quadrature_points)
        .into_par_iter()
        .map(|i| {
            let u = lo + (i as f64 + 0.5) * step;
            let table = cocycle.table(&NsPoint::new(u)?, horizon)?;
            Ok(table.values().iter().map(|v| v.exp()).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut per_step = vec![0.0; 2 * horizon + 1];
    for row in &rows {
        for (acc, v) in per_step.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in per_step.iter_mut() {
        *v *= step;
    }
    let value: f64 = per_step.iter().sum();
    if !value.is_finite() {
        return Err(Error::QuadratureDivergence(format!(
            "non-finite integral over [{lo}, {hi})"
        )));
    }
    let tail_decaying = horizon == 0 || {
        let outer = per_step[0] + per_step[2 * horizon];
        let inner = per_step[1] + per_step[2 * horizon - 1];
        outer <= inner
    };
    Ok(SumIntegralReport {
        value,
        per_step,
        image_lengths,
        tail_decaying,
    })
}

/// Axis-parallel square `[x, x+side) × [y, y+side)` on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub x: f64,
    pub y: f64,
    pub side: f64,
}

impl Square {
    pub fn contains(&self, p: &TorusPoint) -> bool {
        let dx = crate::systems::torus_wrap(p.x - self.x);
        let dy = crate::systems::torus_wrap(p.y - self.y);
        dx < self.side && dy < self.side
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> TorusPoint {
        let t = uniform_torus(rng);
        TorusPoint::new(self.x + self.side * t.x, self.y + self.side * t.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport {
    /// Returns to the square within the iteration budget, per sample.
    pub returns: Vec<u64>,
    /// `(r, fraction of samples with ≥ r returns)` for `r = 1, 10, 100`.
    pub fractions: Vec<(u64, f64)>,
}

pub const RETURN_THRESHOLDS: [u64; 3] = [1, 10, 100];

/// Counts cat-map returns to `square` of seeded samples drawn inside it.
pub fn recurrence_check(
    square: &Square,
    samples: usize,
    n_iter: u64,
    seed: u64,
) -> Result<RecurrenceReport> {
    if samples == 0 || !(square.side > 0.0 && square.side <= 1.0) {
        return Err(Error::InvalidArgument(
            "need samples ≥ 1 and a square side in (0,1]".into(),
        ));
    }
    let points: Vec<TorusPoint> = (0..samples as u64)
        .map(|i| square.sample(&mut sample_rng(seed, i)))
        .collect();
    Ok(recurrence_from_points(square, &points, n_iter))
}

pub fn recurrence_from_points(square: &Square, points: &[TorusPoint], n_iter: u64) -> RecurrenceReport {
    let returns: Vec<u64> = points
        .par_iter()
        .map(|x| {
            let mut p = *x;
            let mut count = 0;
            for _ in 0..n_iter {
                p = CatMap.apply(&p);
                count += u64::from(square.contains(&p));
            }
            count
        })
        .collect();
    let n = returns.len().max(1) as f64;
    let fractions = RETURN_THRESHOLDS
        .iter()
        .map(|&r| (r, returns.iter().filter(|&&c| c >= r).count() as f64 / n))
        .collect();
    RecurrenceReport { returns, fractions }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitivityReport {
    pub eps: f64,
    /// Grid cells per axis; each cell has diameter at most `eps`.
    pub cells_per_axis: usize,
    /// Iterate at which the orbit had visited every cell, per sample.
    pub covered_at: Vec<Option<u64>>,
    pub fraction: f64,
}

/// Fraction of seeded torus points whose forward orbit of length `n_iter`
/// is `eps`-dense, decided on a grid of cells of side `≤ eps/√2`.
pub fn transitivity_report(
    samples: usize,
    n_iter: u64,
    eps: f64,
    seed: u64,
) -> Result<TransitivityReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let points: Vec<TorusPoint> = (0..samples as u64)
        .map(|i| uniform_torus(&mut sample_rng(seed, i)))
        .collect();
    transitivity_from_points(&points, n_iter, eps)
}

pub fn transitivity_from_points(
    points: &[TorusPoint],
    n_iter: u64,
    eps: f64,
) -> Result<TransitivityReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let trivial = eps >= TORUS_DIAMETER;
    let cells = if trivial {
        1
    } else {
        (std::f64::consts::SQRT_2 / eps).ceil() as usize
    };
    let covered_at: Vec<Option<u64>> = points
        .par_iter()
        .map(|x| {
            if trivial {
                return Some(0);
            }
            let mut seen = vec![false; cells * cells];
            let mut remaining = cells * cells;
            let mut p = *x;
            for t in 0..=n_iter {
                if t > 0 {
                    p = CatMap.apply(&p);
                }
                let i = ((p.x * cells as f64) as usize).min(cells - 1);
                let j = ((p.y * cells as f64) as usize).min(cells - 1);
                let cell = &mut seen[i * cells + j];
                if !*cell {
                    *cell = true;
                    remaining -= 1;
                    if remaining == 0 {
                        return Some(t);
                    }
                }
            }
            None
        })
        .collect();
    let dense = covered_at.iter().filter(|c| c.is_some()).count();
    Ok(TransitivityReport {
        eps,
        cells_per_axis: cells,
        fraction: dense as f64 / points.len().max(1) as f64,
        covered_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn ns_half_is_dissipative() {
        let opts = PeakOptions::new(60);
        let x = NsPoint::new(0.5).unwrap();
        assert_eq!(classify_point(&NorthSouth, &x, &opts).unwrap(), HopfClass::Dissipative);
        assert_eq!(
            classify_point(&NorthSouth, &x, &PeakOptions::new(120)).unwrap(),
            HopfClass::Dissipative
        );
    }

    #[test]
    fn cat_map_is_conservative_suspect() {
        let opts = PeakOptions::new(40);
        for p in [TorusPoint::new(0.1, 0.7), TorusPoint::new(0.0, 0.0)] {
            assert_eq!(
                classify_point(&CatMap, &p, &opts).unwrap(),
                HopfClass::ConservativeSuspect
            );
        }
    }

    #[test]
    fn ns_poles_are_unknown() {
        let opts = PeakOptions::new(40);
        for u in [0.0, 1.0] {
            let x = NsPoint::new(u).unwrap();
            assert_eq!(classify_point(&NorthSouth, &x, &opts).unwrap(), HopfClass::Unknown);
        }
    }

    #[test]
    fn shift_has_no_jacobian() {
        let x = crate::systems::ShiftPoint::spike();
        assert!(matches!(
            classify_point(&crate::systems::FullShift, &x, &PeakOptions::new(10)),
            Err(Error::NoJacobian { .. })
        ));
    }

    #[test]
    fn single_sample_report() {
        let r = hopf_report(&NorthSouth, &[NsPoint::new(0.5).unwrap()], &PeakOptions::new(60))
            .unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!(r.interval.0 < 0.5 && r.interval.1 == 1.0);
    }

    #[test]
    fn cat_map_volume_is_zero() {
        let r = estimate_h_volume(&CatMap, uniform_torus, 50, &PeakOptions::new(40), 3).unwrap();
        assert_eq!(r.conservative_suspect, 50);
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(rat("3/10"), BigRational::new(3.into(), 10.into()));
        assert_eq!(rat("0.3"), rat("3/10"));
        assert_eq!(rat("-1.25"), BigRational::new((-5).into(), 4.into()));
        assert_eq!(rat("2"), BigRational::from_integer(2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn annulus_endpoint_is_exact() {
        let w = NsInterval::annulus(rat("3/10")).unwrap();
        assert_eq!(w.hi, rat("6/13"));
        assert_eq!(w.image(1).hi, w.lo);
        assert_eq!(w.image(-1).lo, w.hi);
    }

    #[test]
    fn interval_membership_is_exact() {
        let w = NsInterval::annulus(rat("3/10")).unwrap();
        let p = |u: f64| NsPoint::new(u).unwrap();
        // 0.3 as a double lies just below 3/10
        assert!(!w.contains(&p(0.3)));
        assert!(w.contains(&p(0.300_000_000_000_000_1)));
        assert!(w.contains(&p(0.4)));
        assert!(!w.contains(&p(6.0 / 13.0 + 1e-16)));
        let top = NsInterval::new(rat("1/2"), BigRational::one()).unwrap();
        assert!(top.contains(&NsPoint::from_complement(1e-30).unwrap()));
        assert!(!top.contains(&NsPoint::from_complement(0.0).unwrap()));
    }

    #[test]
    fn annulus_wanders() {
        let w = NsInterval::annulus(rat("3/10")).unwrap();
        let c = wandering_check(&Region::Interval(w), 30).unwrap();
        assert!(c.pass);
        assert_eq!(c.min_separation, 0.0);
    }

    #[test]
    fn whole_interval_does_not_wander() {
        let w = NsInterval::new(BigRational::zero(), BigRational::one()).unwrap();
        let c = wandering_check(&Region::Interval(w), 3).unwrap();
        assert!(!c.pass);
        assert!(c.min_separation < 0.0);
    }

    #[test]
    fn slightly_wide_interval_overlaps_its_image() {
        let w = NsInterval::new(rat("3/10"), rat("6/13") + rat("1/1000000000")).unwrap();
        let c = wandering_check(&Region::Interval(w), 1).unwrap();
        let (i, j) = c.overlap.unwrap();
        assert_eq!(j - i, 1);
    }

    #[test]
    fn torus_rectangle_overlaps_an_image() {
        let c = wandering_check(
            &Region::Rectangle {
                x: 0.05,
                y: 0.05,
                w: 0.3,
                h: 0.3,
            },
            5,
        )
        .unwrap();
        assert!(!c.pass);
        let (_, k) = c.overlap.unwrap();
        // oracle: a sampled point of the rectangle whose k-th image lands in it
        let sq = Square { x: 0.05, y: 0.05, side: 0.3 };
        let hit = (0..4000u64).any(|i| {
            let p = sq.sample(&mut sample_rng(99, i));
            sq.contains(&CatMap.iterate(&p, k))
        });
        assert!(hit, "no witness for k = {k}");
    }

    #[test]
    fn tiny_rectangle_eventually_overlaps_or_exhausts() {
        let c = wandering_check(
            &Region::Rectangle {
                x: 0.3,
                y: 0.6,
                w: 1e-3,
                h: 1e-3,
            },
            20,
        )
        .unwrap();
        assert!(!c.pass);
    }

    #[test]
    fn zero_horizon_integral_is_length() {
        let w = NsInterval::annulus(rat("3/10")).unwrap();
        let r = sum_integral_check(&w, 0, 1000).unwrap();
        let len = w.length().to_f64().unwrap();
        assert!((r.value - len).abs() < 1e-15);
        assert_eq!(r.image_lengths, len);
    }

    #[test]
    fn empty_interval_integrates_to_zero() {
        let w = NsInterval::new(rat("1/2"), rat("1/2")).unwrap();
        assert_eq!(sum_integral_check(&w, 5, 10).unwrap().value, 0.0);
    }

    #[test]
    fn integral_matches_image_lengths() {
        let w = NsInterval::annulus(rat("3/10")).unwrap();
        let r = sum_integral_check(&w, 10, 2000).unwrap();
        assert!((r.value - r.image_lengths).abs() < 1e-6);
        assert!(r.value <= 1.0 + 1e-6);
        assert!(r.tail_decaying);
    }

    #[test]
    fn fixed_point_recurs_every_step() {
        let sq = Square { x: 0.0, y: 0.0, side: 0.2 };
        let r = recurrence_from_points(&sq, &[TorusPoint::new(0.0, 0.0)], 500);
        assert_eq!(r.returns, vec![500]);
        let r = recurrence_from_points(&sq, &[TorusPoint::new(0.0, 0.0)], 0);
        assert!(r.fractions.iter().all(|&(_, f)| f == 0.0));
    }

    #[test]
    fn fixed_point_is_not_dense() {
        let r = transitivity_from_points(&[TorusPoint::new(0.0, 0.0)], 1000, 0.05).unwrap();
        assert_eq!(r.covered_at, vec![None]);
        let r = transitivity_from_points(&[TorusPoint::new(0.0, 0.0)], 0, 0.8).unwrap();
        assert_eq!(r.fraction, 1.0);
    }

    #[test]
    fn lattice_orbits_are_exact() {
        let mut rng = sample_rng(5, 0);
        let p = uniform_torus(&mut rng);
        let q = CatMap.iterate(&CatMap.iterate(&p, 500), -500);
        assert_eq!(p, q);
    }
}
