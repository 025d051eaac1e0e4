use thiserror::Error;

use crate::systems::SystemKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate {value} outside the domain [0, 1]")]
    Domain { value: f64 },

    #[error("cannot compare a {left:?} point with a {right:?} point")]
    SystemMismatch { left: SystemKind, right: SystemKind },

    #[error("observable {observable} is not defined on the {system:?} system")]
    UnsupportedObservable {
        observable: String,
        system: SystemKind,
    },

    #[error("{system:?} has no log-Jacobian")]
    NoJacobian { system: SystemKind },

    #[error("requested cocycle time {requested} exceeds the horizon cap {cap}")]
    HorizonCap { requested: u64, cap: u64 },

    #[error("point is not certified to have finite peaks: {reason}")]
    Uncertified { reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("expectation of {observable} under {measure} is not available in closed form")]
    UnsupportedPair { measure: String, observable: String },

    #[error("measures are indistinguishable on the observable dictionary")]
    Indistinguishable,

    #[error("window length {length} exceeds the cap {cap}")]
    WindowCap { length: usize, cap: usize },

    #[error("degenerate word set: no admissible window at depth {depth}")]
    EmptyWordSet { depth: usize },

    #[error("quadrature diverged: {0}")]
    QuadratureDivergence(String),
}
