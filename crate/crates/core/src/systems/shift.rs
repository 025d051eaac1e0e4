//! Two-sided full shift on `{0,1}^ℤ` with `(σx)_i = x_{i+1}`.
//!
//! Points are eventually periodic in both directions:
//!
//! ```text
//!   ... left left left | center | right right right ...
//!                        ^ offset
//! ```
//!
//! so every coordinate is exactly computable and equality is decidable.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::observable::ObservableSpec;

use super::{DynamicalSystem, SystemKind};

#[derive(Clone)]
pub struct ShiftPoint {
    left: Arc<[u8]>,
    center: Arc<[u8]>,
    right: Arc<[u8]>,
    /// Coordinate of `center[0]` (of `right[0]` when the center is empty).
    offset: i64,
}

fn check_word(name: &str, word: &[u8], allow_empty: bool) -> Result<()> {
    if !allow_empty && word.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} period must be nonempty")));
    }
    if word.iter().any(|&s| s > 1) {
        return Err(Error::InvalidArgument(format!("{name} word must be binary")));
    }
    Ok(())
}

impl ShiftPoint {
    /// `left` repeats towards −∞ and ends at coordinate `offset − 1`; `right`
    /// starts right after the center and repeats towards +∞.
    pub fn new(left: &[u8], center: &[u8], right: &[u8], offset: i64) -> Result<Self> {
        check_word("left", left, false)?;
        check_word("center", center, true)?;
        check_word("right", right, false)?;
        Ok(Self {
            left: left.into(),
            center: center.into(),
            right: right.into(),
            offset,
        })
    }

    /// The bi-infinite periodic point with `x_i = word[i mod |word|]`.
    pub fn periodic(word: &[u8]) -> Result<Self> {
        Self::new(word, &[], word, 0)
    }

    /// `...111.000...`: `x_n = 1` for `n < 0` and `0` otherwise.
    pub fn spike() -> Self {
        Self::new(&[1], &[], &[0], 0).expect("valid words")
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn left_period(&self) -> &[u8] {
        &self.left
    }

    pub fn center(&self) -> &[u8] {
        &self.center
    }

    pub fn right_period(&self) -> &[u8] {
        &self.right
    }

    /// Exact coordinate `x_n`.
    pub fn coordinate(&self, n: i64) -> u8 {
        let j = n - self.offset;
        if j < 0 {
            self.left[j.rem_euclid(self.left.len() as i64) as usize]
        } else if (j as usize) < self.center.len() {
            self.center[j as usize]
        } else {
            let k = j as usize - self.center.len();
            self.right[k % self.right.len()]
        }
    }

    /// `σ^k x`; only the offset changes.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            offset: self.offset - k,
            ..self.clone()
        }
    }

    /// Coordinates `lo..=hi` packed into an integer, `x_lo` most significant.
    pub fn window_code(&self, lo: i64, hi: i64) -> u64 {
        debug_assert!(hi - lo < 64);
        (lo..=hi).fold(0u64, |acc, n| (acc << 1) | self.coordinate(n) as u64)
    }

    pub fn window(&self, lo: i64, hi: i64) -> Vec<u8> {
        (lo..=hi).map(|n| self.coordinate(n)).collect()
    }

    /// Range of coordinates outside of which two points agree iff they agree
    /// on this range (both sides are periodic with a common period there).
    fn decision_range(&self, other: &Self) -> (i64, i64) {
        let lo = self.offset.min(other.offset)
            - (self.left.len() as i64).lcm(&(other.left.len() as i64));
        let hi = (self.offset + self.center.len() as i64)
            .max(other.offset + other.center.len() as i64)
            + (self.right.len() as i64).lcm(&(other.right.len() as i64));
        (lo, hi)
    }

    /// Smallest `|n|` with `x_n ≠ y_n`, or `None` if the points are equal.
    pub fn first_disagreement(&self, other: &Self) -> Option<u64> {
        let (lo, hi) = self.decision_range(other);
        let reach = lo.unsigned_abs().max(hi.unsigned_abs());
        (0..=reach).find(|&r| {
            let r = r as i64;
            self.coordinate(r) != other.coordinate(r) || self.coordinate(-r) != other.coordinate(-r)
        })
    }
}

impl PartialEq for ShiftPoint {
    fn eq(&self, other: &Self) -> bool {
        let (lo, hi) = self.decision_range(other);
        (lo..=hi).all(|n| self.coordinate(n) == other.coordinate(n))
    }
}

impl Eq for ShiftPoint {}

impl fmt::Debug for ShiftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |w: &[u8]| w.iter().map(|s| char::from(b'0' + s)).collect::<String>();
        write!(
            f,
            "ShiftPoint(({})^∞ {} ({})^∞ @ {})",
            word(&self.left),
            word(&self.center),
            word(&self.right),
            self.offset
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FullShift;

impl DynamicalSystem for FullShift {
    type Point = ShiftPoint;

    fn kind(&self) -> SystemKind {
        SystemKind::Shift
    }

    fn apply(&self, x: &ShiftPoint) -> ShiftPoint {
        x.shifted(1)
    }

    fn inverse(&self, x: &ShiftPoint) -> ShiftPoint {
        x.shifted(-1)
    }

    fn iterate(&self, x: &ShiftPoint, k: i64) -> ShiftPoint {
        x.shifted(k)
    }

    /// `2^{-min{|n| : x_n ≠ y_n}}`.
    fn distance(&self, x: &ShiftPoint, y: &ShiftPoint) -> f64 {
        match x.first_disagreement(y) {
            None => 0.0,
            Some(n) => 0.5f64.powi(n.min(i32::MAX as u64) as i32),
        }
    }

    fn supports(&self, spec: &ObservableSpec) -> bool {
        spec.all_leaves(&|leaf| matches!(leaf, ObservableSpec::ShiftWindow(_)))
    }

    fn observe(&self, spec: &ObservableSpec, x: &ShiftPoint) -> f64 {
        spec.evaluate(x, &|leaf, x| match leaf {
            ObservableSpec::ShiftWindow(table) => {
                let r = table.radius() as i64;
                table.value(x.window_code(-r, r) as u32)
            }
            other => unreachable!("{other} is not bound to the shift"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_coordinates() {
        let x = ShiftPoint::spike();
        assert_eq!(x.coordinate(-1), 1);
        assert_eq!(x.coordinate(-1000), 1);
        assert_eq!(x.coordinate(0), 0);
        assert_eq!(x.coordinate(77), 0);
        // (σx)_{-1} = x_0
        assert_eq!(FullShift.apply(&x).coordinate(-1), 0);
    }

    #[test]
    fn shift_round_trip_is_exact() {
        let x = ShiftPoint::new(&[1, 0], &[1, 1, 0], &[0, 0, 1], 3).unwrap();
        assert_eq!(FullShift.iterate(&x, 0), x);
        let y = FullShift.inverse(&FullShift.apply(&x));
        assert_eq!(y, x);
        assert_eq!(y.offset(), x.offset());
        for k in -7..7 {
            let s = FullShift.iterate(&x, k);
            for i in -20..20 {
                assert_eq!(s.coordinate(i), x.coordinate(i + k));
            }
        }
    }

    #[test]
    fn equality_ignores_representation() {
        let a = ShiftPoint::periodic(&[0, 1]).unwrap();
        let b = ShiftPoint::new(&[0, 1, 0, 1], &[0, 1], &[0, 1, 0, 1], 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, FullShift.apply(&a));
        assert_eq!(a, FullShift.iterate(&a, 2));
    }

    #[test]
    fn distance_uses_smallest_index() {
        let base = ShiftPoint::periodic(&[0]).unwrap();
        let mut center = vec![0u8; 6];
        center[0] = 1; // coordinate -3
        center[5] = 1; // coordinate 2
        let y = ShiftPoint::new(&[0], &center, &[0], -3).unwrap();
        assert_eq!(FullShift.distance(&base, &y), 0.25);
        assert_eq!(FullShift.distance(&base, &base), 0.0);
    }

    #[test]
    fn rejects_bad_words() {
        assert!(ShiftPoint::new(&[], &[], &[0], 0).is_err());
        assert!(ShiftPoint::new(&[2], &[], &[0], 0).is_err());
    }
}
