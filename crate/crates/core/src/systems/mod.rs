//! Reference dynamical systems behind one contract.
//!
//! Each system is a homeomorphism `f` of a compact metric space with an
//! explicit inverse. The North–South interval map and the cat map also
//! carry a log-Jacobian with respect to normalized Lebesgue measure.

mod north_south;
mod shift;
mod torus;

pub use north_south::{ns_apply, ns_inverse, ns_log_jacobian, NorthSouth, NsPoint};
pub use shift::{FullShift, ShiftPoint};
pub use torus::{wrap as torus_wrap, CatMap, TorusPoint, TORUS_DIAMETER};

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::observable::ObservableSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    NorthSouth,
    CatMap,
    Shift,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::NorthSouth => "north-south",
            SystemKind::CatMap => "cat-map",
            SystemKind::Shift => "shift",
        }
    }

    /// Metric on [`AnyPoint`]s; mixing points of different systems is an error.
    pub fn distance(self, a: &AnyPoint, b: &AnyPoint) -> Result<f64> {
        match (self, a, b) {
            (SystemKind::NorthSouth, AnyPoint::NorthSouth(p), AnyPoint::NorthSouth(q)) => {
                Ok(NorthSouth.distance(p, q))
            }
            (SystemKind::CatMap, AnyPoint::Torus(p), AnyPoint::Torus(q)) => {
                Ok(CatMap.distance(p, q))
            }
            (SystemKind::Shift, AnyPoint::Shift(p), AnyPoint::Shift(q)) => {
                Ok(FullShift.distance(p, q))
            }
            _ => {
                let left = if a.kind() != self { a.kind() } else { b.kind() };
                Err(Error::SystemMismatch { left, right: self })
            }
        }
    }
}

/// A point of any of the reference systems, for callers that select the
/// system at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoint {
    NorthSouth(NsPoint),
    Torus(TorusPoint),
    Shift(ShiftPoint),
}

impl AnyPoint {
    pub fn kind(&self) -> SystemKind {
        match self {
            AnyPoint::NorthSouth(_) => SystemKind::NorthSouth,
            AnyPoint::Torus(_) => SystemKind::CatMap,
            AnyPoint::Shift(_) => SystemKind::Shift,
        }
    }
}

pub trait DynamicalSystem: Sync + Send {
    type Point: Clone + Debug + Send + Sync;

    fn kind(&self) -> SystemKind;

    fn apply(&self, x: &Self::Point) -> Self::Point;

    fn inverse(&self, x: &Self::Point) -> Self::Point;

    /// `f^k x` for any integer `k`.
    fn iterate(&self, x: &Self::Point, k: i64) -> Self::Point {
        let mut y = x.clone();
        if k >= 0 {
            for _ in 0..k {
                y = self.apply(&y);
            }
        } else {
            for _ in 0..k.unsigned_abs() {
                y = self.inverse(&y);
            }
        }
        y
    }

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// Logarithm of the Jacobian with respect to the reference volume, when
    /// the system has one.
    fn log_jacobian(&self, _x: &Self::Point) -> Option<f64> {
        None
    }

    /// Whether `spec` can be evaluated on this system's points.
    fn supports(&self, spec: &ObservableSpec) -> bool;

    /// Evaluates an observable. Only called on specs accepted by
    /// [`DynamicalSystem::supports`].
    fn observe(&self, spec: &ObservableSpec, x: &Self::Point) -> f64;
}

/// `[f^{n_from} x, ..., f^{n_to} x]`.
pub fn orbit<S: DynamicalSystem>(
    sys: &S,
    x: &S::Point,
    n_from: i64,
    n_to: i64,
) -> Result<Vec<S::Point>> {
    if n_from > n_to {
        return Err(Error::InvalidArgument(format!(
            "orbit range {n_from}..={n_to} is empty"
        )));
    }
    let mut out = Vec::with_capacity((n_to - n_from + 1) as usize);
    let mut y = sys.iterate(x, n_from);
    out.push(y.clone());
    for _ in n_from..n_to {
        y = sys.apply(&y);
        out.push(y.clone());
    }
    Ok(out)
}
