//! Continuous observables `φ ∈ C(X, ℝ)`.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::systems::DynamicalSystem;

/// Anything that can be evaluated pointwise along an orbit.
pub trait Observable<P>: Sync {
    fn value(&self, x: &P) -> f64;
}

impl<P, F> Observable<P> for F
where
    F: Fn(&P) -> f64 + Sync,
{
    fn value(&self, x: &P) -> f64 {
        self(x)
    }
}

/// Lookup table indexed by the word `x_{-r} .. x_r`, with `x_{-r}` as the
/// most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowTable {
    radius: usize,
    values: Vec<f64>,
}

/// Largest supported window radius (window length 21).
pub const MAX_WINDOW_RADIUS: usize = 10;

impl WindowTable {
    pub fn new(radius: usize, values: Vec<f64>) -> Result<Self> {
        if radius > MAX_WINDOW_RADIUS {
            return Err(Error::InvalidArgument(format!(
                "window radius {radius} exceeds {MAX_WINDOW_RADIUS}"
            )));
        }
        let expected = 1usize << (2 * radius + 1);
        if values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "window table of radius {radius} needs {expected} entries, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("window table has non-finite entries".into()));
        }
        Ok(Self { radius, values })
    }

    /// Builds a table from a function of the window word (index 0 is `x_{-r}`).
    pub fn from_fn(radius: usize, f: impl Fn(&[u8]) -> f64) -> Result<Self> {
        let len = 2 * radius + 1;
        let values = (0..1usize << len)
            .map(|code| f(&decode_word(code as u32, len)))
            .collect();
        Self::new(radius, values)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, code: u32) -> f64 {
        self.values[code as usize]
    }
}

/// Splits a code into its bits, most significant first.
pub fn decode_word(code: u32, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((code >> (len - 1 - i)) & 1) as u8).collect()
}

/// One term `amplitude · cos(2π(kx·x + ky·y) + phase)` of a torus observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub kx: i32,
    pub ky: i32,
    pub phase: f64,
}

impl TrigTerm {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.amplitude * (TAU * (self.kx as f64 * x + self.ky as f64 * y) + self.phase).cos()
    }

    /// Lebesgue mean over the torus.
    pub fn mean(&self) -> f64 {
        if self.kx == 0 && self.ky == 0 {
            self.amplitude * self.phase.cos()
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObservableSpec {
    /// The system's own log-Jacobian (identically zero on the cat map).
    LogJacobian,
    Constant(f64),
    ShiftWindow(WindowTable),
    TorusTrig(Vec<TrigTerm>),
    Affine {
        inner: Box<ObservableSpec>,
        scale: f64,
        offset: f64,
    },
}

impl ObservableSpec {
    /// `y ↦ 2·y_0 − 1`.
    pub fn symbol_sign() -> Self {
        ObservableSpec::ShiftWindow(WindowTable {
            radius: 0,
            values: vec![-1.0, 1.0],
        })
    }

    /// `y ↦ 1[y_0 = 1]`.
    pub fn symbol_indicator() -> Self {
        ObservableSpec::ShiftWindow(WindowTable {
            radius: 0,
            values: vec![0.0, 1.0],
        })
    }

    /// Indicator of the cylinder `[x_{-r} .. x_r] = word`.
    pub fn cylinder(word: &[u8]) -> Result<Self> {
        if word.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "cylinder word must have odd length 2r+1".into(),
            ));
        }
        if word.iter().any(|&s| s > 1) {
            return Err(Error::InvalidArgument("cylinder word must be binary".into()));
        }
        let radius = word.len() / 2;
        let target = word.to_vec();
        Ok(ObservableSpec::ShiftWindow(WindowTable::from_fn(
            radius,
            move |w| if w == target.as_slice() { 1.0 } else { 0.0 },
        )?))
    }

    /// All cylinder indicators of radius `0..=max_radius`, ordered by radius
    /// and then by word code.
    pub fn cylinder_dictionary(max_radius: usize) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for r in 0..=max_radius {
            let len = 2 * r + 1;
            for code in 0..1u32 << len {
                out.push(Self::cylinder(&decode_word(code, len))?);
            }
        }
        Ok(out)
    }

    pub fn affine(inner: ObservableSpec, scale: f64, offset: f64) -> Self {
        ObservableSpec::Affine {
            inner: Box::new(inner),
            scale,
            offset,
        }
    }

    /// Binds the spec to a system after checking that it is defined there.
    pub fn bind<'a, S: DynamicalSystem>(&'a self, sys: &'a S) -> Result<Bound<'a, S>> {
        if sys.supports(self) {
            Ok(Bound { sys, spec: self })
        } else {
            Err(Error::UnsupportedObservable {
                observable: self.to_string(),
                system: sys.kind(),
            })
        }
    }

    /// Evaluates constants and affine wrappers here and hands every other
    /// leaf to `leaf`.
    pub(crate) fn evaluate<P>(&self, x: &P, leaf: &dyn Fn(&ObservableSpec, &P) -> f64) -> f64 {
        match self {
            ObservableSpec::Constant(c) => *c,
            ObservableSpec::Affine {
                inner,
                scale,
                offset,
            } => scale * inner.evaluate(x, leaf) + offset,
            other => leaf(other, x),
        }
    }

    /// Structural support check; `leaf_ok` decides the system-specific leaves.
    pub(crate) fn all_leaves(&self, leaf_ok: &dyn Fn(&ObservableSpec) -> bool) -> bool {
        match self {
            ObservableSpec::Constant(c) => c.is_finite(),
            ObservableSpec::Affine {
                inner,
                scale,
                offset,
            } => scale.is_finite() && offset.is_finite() && inner.all_leaves(leaf_ok),
            other => leaf_ok(other),
        }
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableSpec::LogJacobian => write!(f, "log-jacobian"),
            ObservableSpec::Constant(c) => write!(f, "constant({c})"),
            ObservableSpec::ShiftWindow(t) => write!(f, "shift-window(r={})", t.radius),
            ObservableSpec::TorusTrig(terms) => write!(f, "torus-trig({} terms)", terms.len()),
            ObservableSpec::Affine {
                inner,
                scale,
                offset,
            } => write!(f, "{scale}*{inner}+{offset}"),
        }
    }
}

/// An [`ObservableSpec`] validated against a concrete system.
#[derive(Debug)]
pub struct Bound<'a, S> {
    sys: &'a S,
    spec: &'a ObservableSpec,
}

impl<S> Clone for Bound<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for Bound<'_, S> {}

impl<'a, S> Bound<'a, S> {
    pub fn spec(&self) -> &'a ObservableSpec {
        self.spec
    }
}

impl<S: DynamicalSystem> Observable<S::Point> for Bound<'_, S> {
    fn value(&self, x: &S::Point) -> f64 {
        self.sys.observe(self.spec, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_table_rejects_wrong_length() {
        assert!(WindowTable::new(1, vec![0.0; 4]).is_err());
        assert!(WindowTable::new(1, vec![0.0; 8]).is_ok());
    }

    #[test]
    fn dictionary_has_all_short_cylinders() {
        let dict = ObservableSpec::cylinder_dictionary(2).unwrap();
        assert_eq!(dict.len(), 2 + 8 + 32);
    }

    #[test]
    fn decode_is_msb_first() {
        assert_eq!(decode_word(0b110, 3), vec![1, 1, 0]);
    }

    #[test]
    fn trig_mean_only_from_constant_mode() {
        let t = TrigTerm {
            amplitude: 2.0,
            kx: 0,
            ky: 0,
            phase: 0.0,
        };
        assert_eq!(t.mean(), 2.0);
        let t = TrigTerm { kx: 1, ..t };
        assert_eq!(t.mean(), 0.0);
    }
}
