//! Finite-peak cocycles over reference homeomorphisms.
//!
//! The crate works with three concrete systems (the North–South interval
//! map, the Arnold cat map and the two-sided full shift), additive cocycles
//! `φ_n` generated by continuous observables, and the fundamental domain
//! `W = {n_f = 0}` of the set of points whose cocycle has a finite peak.
//! On top of that sit Monte Carlo estimates of the dissipative part of the
//! Hopf decomposition, empirical Birkhoff averages on heteroclinic splices,
//! and Bowen-ball counts for directional entropy.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod birkhoff;
pub mod cocycle;
pub mod entropy;
pub mod error;
pub mod hopf;
pub mod observable;
pub mod stats;
pub mod systems;

pub use cocycle::{Certificate, Cocycle, PeakOptions, PeakProfile, Section};
pub use error::{Error, Result};
pub use observable::{Observable, ObservableSpec};
pub use systems::{
    AnyPoint, CatMap, DynamicalSystem, FullShift, NorthSouth, NsPoint, ShiftPoint, SystemKind,
    TorusPoint,
};
