//! Arnold cat map `[[2,1],[1,1]]` on the flat 2-torus.

use crate::observable::ObservableSpec;

use super::{DynamicalSystem, SystemKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

/// Reduces into `[0, 1)`.
pub fn wrap(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed representative of `t mod 1` in `[-1/2, 1/2)`.
pub(crate) fn wrap_signed(t: f64) -> f64 {
    let r = wrap(t);
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            x: wrap(x),
            y: wrap(y),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CatMap;

/// Diameter of the flat unit torus.
pub const TORUS_DIAMETER: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl DynamicalSystem for CatMap {
    type Point = TorusPoint;

    fn kind(&self) -> SystemKind {
        SystemKind::CatMap
    }

    fn apply(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint::new(2.0 * p.x + p.y, p.x + p.y)
    }

    fn inverse(&self, p: &TorusPoint) -> TorusPoint {
        TorusPoint::new(p.x - p.y, 2.0 * p.y - p.x)
    }

    fn distance(&self, a: &TorusPoint, b: &TorusPoint) -> f64 {
        wrap_signed(a.x - b.x).hypot(wrap_signed(a.y - b.y))
    }

    fn log_jacobian(&self, _p: &TorusPoint) -> Option<f64> {
        // det [[2,1],[1,1]] = 1
        Some(0.0)
    }

    fn supports(&self, spec: &ObservableSpec) -> bool {
        spec.all_leaves(&|leaf| match leaf {
            ObservableSpec::LogJacobian => true,
            ObservableSpec::TorusTrig(terms) => terms
                .iter()
                .all(|t| t.amplitude.is_finite() && t.phase.is_finite()),
            _ => false,
        })
    }

    fn observe(&self, spec: &ObservableSpec, p: &TorusPoint) -> f64 {
        spec.evaluate(p, &|leaf, p| match leaf {
            ObservableSpec::LogJacobian => 0.0,
            ObservableSpec::TorusTrig(terms) => terms.iter().map(|t| t.eval(p.x, p.y)).sum(),
            other => unreachable!("{other} is not bound to the cat map"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::orbit;

    #[test]
    fn origin_is_fixed() {
        let o = TorusPoint::new(0.0, 0.0);
        assert_eq!(CatMap.apply(&o), o);
        assert!(orbit(&CatMap, &o, -5, 5).unwrap().iter().all(|p| *p == o));
    }

    #[test]
    fn direct_arithmetic() {
        let p = CatMap.apply(&TorusPoint::new(0.5, 0.5));
        assert_eq!(p, TorusPoint::new(0.5, 0.0));
        let q = CatMap.inverse(&TorusPoint::new(0.5, 0.0));
        assert_eq!(q, TorusPoint::new(0.5, 0.5));
    }

    #[test]
    fn flat_metric_wraps() {
        let d = CatMap.distance(&TorusPoint::new(0.0, 0.0), &TorusPoint::new(0.5, 0.0));
        assert_eq!(d, 0.5);
        let d = CatMap.distance(&TorusPoint::new(0.05, 0.0), &TorusPoint::new(0.95, 0.0));
        assert!((d - 0.1).abs() < 1e-12);
    }

    #[test]
    fn wrap_never_returns_one() {
        assert_eq!(wrap(-1e-20), 0.0);
        assert!(wrap(-1e-17) < 1.0);
        assert_eq!(wrap(3.0), 0.0);
    }
}
