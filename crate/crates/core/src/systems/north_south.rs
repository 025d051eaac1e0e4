//! North–South map on the interval: `g(u) = u / (2 − u)`.
//!
//! `0` is the attracting pole S (multiplier 1/2) and `1` the repelling pole
//! N (multiplier 2). Points store both `u` and `1 − u` so that orbits near
//! either pole keep full relative precision.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::observable::ObservableSpec;

use super::{DynamicalSystem, SystemKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsPoint {
    u: f64,
    v: f64,
}

impl NsPoint {
    pub fn new(u: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain { value: u });
        }
        Ok(Self { u, v: 1.0 - u })
    }

    /// Point with complementary coordinate `1 − u = v`, for points close to N.
    pub fn from_complement(v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain { value: 1.0 - v });
        }
        Ok(Self { u: 1.0 - v, v })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// `1 − u`, accurate even when `u` rounds to 1.
    pub fn complement(&self) -> f64 {
        self.v
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NorthSouth;

impl NorthSouth {
    pub fn log_jacobian_at(&self, p: &NsPoint) -> f64 {
        // g'(u) = 2 / (2 - u)^2 and 2 - u = 1 + v
        LN_2 - 2.0 * p.v.ln_1p()
    }
}

impl DynamicalSystem for NorthSouth {
    type Point = NsPoint;

    fn kind(&self) -> SystemKind {
        SystemKind::NorthSouth
    }

    fn apply(&self, p: &NsPoint) -> NsPoint {
        let d = 1.0 + p.v;
        NsPoint {
            u: p.u / d,
            v: 2.0 * p.v / d,
        }
    }

    fn inverse(&self, p: &NsPoint) -> NsPoint {
        let d = 1.0 + p.u;
        NsPoint {
            u: 2.0 * p.u / d,
            v: p.v / d,
        }
    }

    fn distance(&self, a: &NsPoint, b: &NsPoint) -> f64 {
        if a.u >= 0.5 && b.u >= 0.5 {
            (a.v - b.v).abs()
        } else {
            (a.u - b.u).abs()
        }
    }

    fn log_jacobian(&self, p: &NsPoint) -> Option<f64> {
        Some(self.log_jacobian_at(p))
    }

    fn supports(&self, spec: &ObservableSpec) -> bool {
        spec.all_leaves(&|leaf| matches!(leaf, ObservableSpec::LogJacobian))
    }

    fn observe(&self, spec: &ObservableSpec, p: &NsPoint) -> f64 {
        spec.evaluate(p, &|leaf, p| match leaf {
            ObservableSpec::LogJacobian => self.log_jacobian_at(p),
            other => unreachable!("{other} is not bound to the north-south map"),
        })
    }
}

pub fn ns_apply(u: f64) -> Result<f64> {
    Ok(NorthSouth.apply(&NsPoint::new(u)?).u)
}

pub fn ns_inverse(u: f64) -> Result<f64> {
    Ok(NorthSouth.inverse(&NsPoint::new(u)?).u)
}

pub fn ns_log_jacobian(u: f64) -> Result<f64> {
    Ok(NorthSouth.log_jacobian_at(&NsPoint::new(u)?))
}
