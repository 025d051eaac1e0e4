//! Bowen dimensional entropy on the full 2-shift by exact cylinder counts.
//!
//! A Bowen ball `B(x, 2^{-m}, k)` is the cylinder fixing coordinates
//! `[-m, k-1+m]` of `x`, so a minimal equal-depth cover of a set `E` has one
//! ball per distinct window word realized by `E`. Counts are exact; the
//! critical exponent is read off as a regression slope.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::birkhoff::Direction;
use crate::error::{Error, Result};
use crate::stats::least_squares;
use crate::systems::ShiftPoint;

/// Longest window any count is computed on.
pub const MAX_WINDOW: usize = 28;

/// Longest window the brute-force enumerator accepts.
pub const BRUTE_FORCE_MAX_WINDOW: usize = 22;

/// Slack in frequency-band comparisons, so that bands given as decimals
/// include their endpoints.
const BAND_SLACK: f64 = 1e-12;

/// Coordinates `[-m, k-1+m]` fixed by the Bowen ball of depth `k` and
/// radius `2^{-m}`.
pub fn bowen_ball_window(k: usize, m: usize) -> Result<(i64, i64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("Bowen depth must be ≥ 1".into()));
    }
    Ok((-(m as i64), (k + m) as i64 - 1))
}

/// Window counted at depth `n` and resolution `m`: `n + 2m + 1` coordinates
/// starting at `-m` (forward) or ending at `m` (backward, for the inverse
/// shift).
pub fn count_window(n: usize, m: usize, direction: Direction) -> Result<(i64, i64)> {
    let len = n + 2 * m + 1;
    if len > MAX_WINDOW {
        return Err(Error::WindowCap {
            length: len,
            cap: MAX_WINDOW,
        });
    }
    let (m, n) = (m as i64, n as i64);
    Ok(match direction {
        Direction::Forward => (-m, n + m),
        Direction::Backward => (-n - m, m),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandWidth {
    Fixed(f64),
    /// `δ = 1/n` at depth `n`.
    InverseDepth,
}

impl BandWidth {
    fn at(self, depth: usize) -> f64 {
        match self {
            BandWidth::Fixed(d) => d,
            BandWidth::InverseDepth => 1.0 / depth.max(1) as f64,
        }
    }
}

/// Finite-window description of a subset `E` of the shift.
#[derive(Debug, Clone, PartialEq)]
pub enum WordSetOracle {
    FullShift,
    /// Words whose frequency of 1s is within `delta` of `p`.
    FrequencyBand { p: f64, delta: f64 },
    /// Past coordinates `< 0` in a band around `past`, future coordinates
    /// `≥ 0` in a band around `future`; a side shorter than `junction`
    /// is unconstrained.
    SplicedFamily {
        past: f64,
        future: f64,
        junction: usize,
        band: BandWidth,
    },
    /// The points themselves; their windows are read off directly.
    ExplicitList(Vec<ShiftPoint>),
    Union(Vec<WordSetOracle>),
}

/// Geometry of one counted window.
#[derive(Debug, Clone, Copy)]
struct Frame {
    lo: i64,
    hi: i64,
    depth: usize,
}

impl Frame {
    fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    fn past_len(&self) -> usize {
        (self.hi.min(-1) - self.lo + 1).max(0) as usize
    }

    fn future_len(&self) -> usize {
        self.len() - self.past_len()
    }

    /// Ones among past and future coordinates of a window code.
    fn split(&self, code: u64) -> (usize, usize) {
        let f = self.future_len();
        let future_mask = if f == 64 { u64::MAX } else { (1u64 << f) - 1 };
        let kf = (code & future_mask).count_ones() as usize;
        let kp = (code >> f).count_ones() as usize;
        (kp, kf)
    }
}

fn in_band(ones: usize, len: usize, p: f64, delta: f64) -> bool {
    len == 0 || (ones as f64 / len as f64 - p).abs() <= delta + BAND_SLACK
}

impl WordSetOracle {
    pub fn frequency_band(p: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "frequency band needs p ∈ [0,1] and δ ≥ 0, got p={p}, δ={delta}"
            )));
        }
        Ok(WordSetOracle::FrequencyBand { p, delta })
    }

    /// Membership of all words with `kp` past and `kf` future ones;
    /// explicit lists never match by class.
    fn class_member(&self, frame: &Frame, kp: usize, kf: usize) -> bool {
        match self {
            WordSetOracle::FullShift => true,
            WordSetOracle::FrequencyBand { p, delta } => in_band(kp + kf, frame.len(), *p, *delta),
            WordSetOracle::SplicedFamily {
                past,
                future,
                junction,
                band,
            } => {
                let delta = band.at(frame.depth);
                let (pl, fl) = (frame.past_len(), frame.future_len());
                (pl < *junction || in_band(kp, pl, *past, delta))
                    && (fl < *junction || in_band(kf, fl, *future, delta))
            }
            WordSetOracle::ExplicitList(_) => false,
            WordSetOracle::Union(parts) => parts.iter().any(|e| e.class_member(frame, kp, kf)),
        }
    }

    fn explicit_codes(&self, frame: &Frame, out: &mut BTreeSet<u64>) {
        match self {
            WordSetOracle::ExplicitList(points) => {
                out.extend(points.iter().map(|x| x.window_code(frame.lo, frame.hi)));
            }
            WordSetOracle::Union(parts) => {
                for e in parts {
                    e.explicit_codes(frame, out);
                }
            }
            _ => {}
        }
    }

    fn is_empty_description(&self) -> bool {
        match self {
            WordSetOracle::ExplicitList(points) => points.is_empty(),
            WordSetOracle::Union(parts) => parts.iter().all(|e| e.is_empty_description()),
            _ => false,
        }
    }

    /// Whether the window word `code` on `[lo, hi]` is realized by `E`.
    pub fn contains_window(&self, lo: i64, hi: i64, depth: usize, code: u64) -> bool {
        let frame = Frame { lo, hi, depth };
        let (kp, kf) = frame.split(code);
        if self.class_member(&frame, kp, kf) {
            return true;
        }
        let mut codes = BTreeSet::new();
        self.explicit_codes(&frame, &mut codes);
        codes.contains(&code)
    }
}

fn binomials(n: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

fn frame(n: usize, m: usize, direction: Direction) -> Result<Frame> {
    let (lo, hi) = count_window(n, m, direction)?;
    Ok(Frame { lo, hi, depth: n })
}

/// Number of distinct windows realized by `E` at depth `n` and resolution
/// `m`, i.e. the size of a minimal equal-depth Bowen cover. Computed by
/// summing binomial class sizes.
pub fn cover_count(e: &WordSetOracle, n: usize, m: usize, direction: Direction) -> Result<u64> {
    let fr = frame(n, m, direction)?;
    let (pl, fl) = (fr.past_len(), fr.future_len());
    let c = binomials(fr.len());
    let mut total = 0u64;
    for kp in 0..=pl {
        for kf in 0..=fl {
            if e.class_member(&fr, kp, kf) {
                total += c[pl][kp] * c[fl][kf];
            }
        }
    }
    let mut codes = BTreeSet::new();
    e.explicit_codes(&fr, &mut codes);
    total += codes
        .into_iter()
        .filter(|&code| {
            let (kp, kf) = fr.split(code);
            !e.class_member(&fr, kp, kf)
        })
        .count() as u64;
    Ok(total)
}

/// Direct loop over all `2^L` window words; only for `L ≤ 22`.
pub fn brute_force_count(e: &WordSetOracle, n: usize, m: usize, direction: Direction) -> Result<u64> {
    let fr = frame(n, m, direction)?;
    if fr.len() > BRUTE_FORCE_MAX_WINDOW {
        return Err(Error::WindowCap {
            length: fr.len(),
            cap: BRUTE_FORCE_MAX_WINDOW,
        });
    }
    let mut codes = BTreeSet::new();
    e.explicit_codes(&fr, &mut codes);
    let total = (0..1u64 << fr.len())
        .into_par_iter()
        .filter(|&code| {
            let ones_past = (fr.lo..fr.lo + fr.past_len() as i64)
                .filter(|&i| (code >> (fr.hi - i)) & 1 == 1)
                .count();
            let ones_future = (fr.hi - fr.future_len() as i64 + 1..=fr.hi)
                .filter(|&i| (code >> (fr.hi - i)) & 1 == 1)
                .count();
            e.class_member(&fr, ones_past, ones_future) || codes.contains(&code)
        })
        .count();
    Ok(total as u64)
}

/// Size of a maximal `(n, 2^{-m})`-separated subset of `E`. Distinct
/// window words lie in disjoint cylinders, so this builds the set of
/// admissible words symbol by symbol and counts its leaves.
pub fn separated_count(e: &WordSetOracle, n: usize, m: usize, direction: Direction) -> Result<u64> {
    let fr = frame(n, m, direction)?;
    let mut codes = BTreeSet::new();
    e.explicit_codes(&fr, &mut codes);
    let (pl, fl) = (fr.past_len(), fr.future_len());
    let len = pl + fl;
    // reach[pos][kp][kf]: some completion of a prefix of length pos with
    // these counts is admissible
    let mut reach = vec![vec![vec![false; fl + 1]; pl + 1]; len + 1];
    for kp in 0..=pl {
        for kf in 0..=fl {
            reach[len][kp][kf] = e.class_member(&fr, kp, kf);
        }
    }
    for pos in (0..len).rev() {
        for kp in 0..=pl {
            for kf in 0..=fl {
                reach[pos][kp][kf] = if pos < pl {
                    reach[pos + 1][kp][kf] || (kp < pl && reach[pos + 1][kp + 1][kf])
                } else {
                    reach[pos + 1][kp][kf] || (kf < fl && reach[pos + 1][kp][kf + 1])
                };
            }
        }
    }
    let class_words = grow(&reach, pl, 0, 0, 0);
    let extra = codes
        .into_iter()
        .filter(|&code| {
            let (kp, kf) = fr.split(code);
            !reach[len][kp][kf]
        })
        .count() as u64;
    Ok(class_words + extra)
}

/// Counts admissible words by extending a prefix one symbol at a time.
fn grow(reach: &[Vec<Vec<bool>>], pl: usize, pos: usize, kp: usize, kf: usize) -> u64 {
    if !reach[pos][kp][kf] {
        return 0;
    }
    if pos + 1 == reach.len() {
        return 1;
    }
    let one = if pos < pl { (kp + 1, kf) } else { (kp, kf + 1) };
    grow(reach, pl, pos + 1, kp, kf) + grow(reach, pl, pos + 1, one.0, one.1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub m: usize,
    pub depths: Vec<usize>,
    pub counts: Vec<u64>,
    pub log_counts: Vec<f64>,
    /// Least-squares slope of `log N(n)` against `n`.
    pub slope: f64,
    pub slope_stderr: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

/// Bisection for the boundary of a predicate that is false below and true
/// above on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Critical exponent of `t ↦ N(n)·e^{-tn}` over the given depths.
///
/// `t_hi` is the least `t` at which the fitted surrogate halves across the
/// depth range, `t_lo` the largest at which it still doubles, widened to
/// `slope − stderr` and clamped at 0.
pub fn h_estimate(
    e: &WordSetOracle,
    m: usize,
    depths: &[usize],
    direction: Direction,
) -> Result<EntropyEstimate> {
    if depths.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "entropy estimate needs at least 4 depths, got {}",
            depths.len()
        )));
    }
    if e.is_empty_description() {
        return Err(Error::EmptyWordSet { depth: depths[0] });
    }
    let counts = depths
        .iter()
        .map(|&n| cover_count(e, n, m, direction))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyWordSet { depth: depths[i] });
    }
    let log_counts: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let xs: Vec<f64> = depths.iter().map(|&n| n as f64).collect();
    let fit = least_squares(&xs, &log_counts).ok_or_else(|| {
        Error::InvalidArgument("entropy estimate needs at least two distinct depths".into())
    })?;
    let (dmin, dmax) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = dmax - dmin;
    // fitted log-surrogate change across the range at exponent t
    let change = |t: f64| (fit.slope - t) * span;
    let upper = fit.slope.abs() + 10.0;
    let t_hi = bisect(-upper, upper, |t| change(t) <= -std::f64::consts::LN_2);
    let t_lo = bisect(-upper, upper, |t| change(t) < std::f64::consts::LN_2);
    let t_lo = t_lo.min(fit.slope - fit.slope_stderr).max(0.0);
    Ok(EntropyEstimate {
        m,
        depths: depths.to_vec(),
        counts,
        log_counts,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        t_lo,
        t_hi: t_hi.max(t_lo),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionReport {
    pub first: EntropyEstimate,
    pub second: EntropyEstimate,
    pub union: EntropyEstimate,
    /// `max(N₁, N₂) ≤ N_∪ ≤ N₁ + N₂` at every depth.
    pub counts_consistent: bool,
    pub pass: bool,
}

/// Checks `h(E₁ ∪ E₂) = max(h(E₁), h(E₂))` on slopes, within 0.03.
pub fn union_max_check(
    e1: &WordSetOracle,
    e2: &WordSetOracle,
    m: usize,
    depths: &[usize],
) -> Result<UnionReport> {
    let first = h_estimate(e1, m, depths, Direction::Forward)?;
    let second = h_estimate(e2, m, depths, Direction::Forward)?;
    let both = WordSetOracle::Union(vec![e1.clone(), e2.clone()]);
    let union = h_estimate(&both, m, depths, Direction::Forward)?;
    let counts_consistent = (0..depths.len()).all(|i| {
        let (a, b, u) = (first.counts[i], second.counts[i], union.counts[i]);
        a.max(b) <= u && u <= a + b
    });
    let pass = counts_consistent && (union.slope - first.slope.max(second.slope)).abs() <= 0.03;
    Ok(UnionReport {
        first,
        second,
        union,
        counts_consistent,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryReport {
    pub family: WordSetOracle,
    pub forward: EntropyEstimate,
    pub backward: EntropyEstimate,
}

/// Forward and backward entropy of the spliced family with Bernoulli(`q`)
/// past and Bernoulli(`p`) future, bands `δ = 1/n` and junction `2m + 2`.
pub fn heteroclinic_asymmetry(
    p: f64,
    q: f64,
    m: usize,
    depths: &[usize],
) -> Result<AsymmetryReport> {
    for v in [p, q] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "Bernoulli parameter must lie in (0,1), got {v}"
            )));
        }
    }
    let family = WordSetOracle::SplicedFamily {
        past: q,
        future: p,
        junction: 2 * m + 2,
        band: BandWidth::InverseDepth,
    };
    let forward = h_estimate(&family, m, depths, Direction::Forward)?;
    let backward = h_estimate(&family, m, depths, Direction::Backward)?;
    Ok(AsymmetryReport {
        family,
        forward,
        backward,
    })
}
