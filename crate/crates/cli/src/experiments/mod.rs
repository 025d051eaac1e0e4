//! The seven batch experiments. Each one parses its parameters from a
//! [`Reader`] before anything is computed, then produces tables and checks.

mod asymmetry;
mod birkhoff;
mod entropy;
mod fund_domain;
mod hopf;
mod orbit;
mod peaks;

use peakdomain_core::Result;

use crate::config::{ConfigResult, Reader};
use crate::report::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Orbit,
    Peaks,
    FundDomain,
    Hopf,
    Birkhoff,
    Entropy,
    Asymmetry,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Orbit,
        Experiment::Peaks,
        Experiment::FundDomain,
        Experiment::Hopf,
        Experiment::Birkhoff,
        Experiment::Entropy,
        Experiment::Asymmetry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Orbit => "orbit",
            Experiment::Peaks => "peaks",
            Experiment::FundDomain => "fund-domain",
            Experiment::Hopf => "hopf",
            Experiment::Birkhoff => "birkhoff",
            Experiment::Entropy => "entropy",
            Experiment::Asymmetry => "asymmetry",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Orbit => {
                "cocycle identity φ_{n+k}(x) = φ_n(x) + φ_k(f^n x) on random systems, observables and times"
            }
            Experiment::Peaks => {
                "peak section π(x) = f^{n_f(x)} x is constant along orbits; shift relation of the peak value"
            }
            Experiment::FundDomain => {
                "fundamental domain {n_f = 0} of the North–South map and a wandering annulus"
            }
            Experiment::Hopf => {
                "dissipative volume, sum–integral bound, cat-map recurrence and ε-density"
            }
            Experiment::Birkhoff => {
                "separating observables and certified peaks at heteroclinic Bernoulli splices"
            }
            Experiment::Entropy => "Bowen-ball entropy of the full shift and of frequency bands",
            Experiment::Asymmetry => {
                "forward versus backward entropy of spliced Bernoulli families"
            }
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// Reads and validates this experiment's parameters.
    pub fn plan(self, r: &mut Reader) -> ConfigResult<Plan> {
        Ok(match self {
            Experiment::Orbit => Plan::Orbit(orbit::Params::read(r)?),
            Experiment::Peaks => Plan::Peaks(peaks::Params::read(r)?),
            Experiment::FundDomain => Plan::FundDomain(fund_domain::Params::read(r)?),
            Experiment::Hopf => Plan::Hopf(hopf::Params::read(r)?),
            Experiment::Birkhoff => Plan::Birkhoff(birkhoff::Params::read(r)?),
            Experiment::Entropy => Plan::Entropy(entropy::Params::read(r)?),
            Experiment::Asymmetry => Plan::Asymmetry(asymmetry::Params::read(r)?),
        })
    }
}

/// Validated parameters of one experiment.
#[derive(Debug, Clone)]
pub enum Plan {
    Orbit(orbit::Params),
    Peaks(peaks::Params),
    FundDomain(fund_domain::Params),
    Hopf(hopf::Params),
    Birkhoff(birkhoff::Params),
    Entropy(entropy::Params),
    Asymmetry(asymmetry::Params),
}

impl Plan {
    pub fn run(&self, seed: u64) -> Result<Outcome> {
        match self {
            Plan::Orbit(p) => p.run(seed),
            Plan::Peaks(p) => p.run(seed),
            Plan::FundDomain(p) => p.run(),
            Plan::Hopf(p) => p.run(seed),
            Plan::Birkhoff(p) => p.run(seed),
            Plan::Entropy(p) => p.run(),
            Plan::Asymmetry(p) => p.run(),
        }
    }
}

/// Parses a comma list of system names against the allowed set.
fn systems(
    r: &mut Reader,
    default: &str,
    allowed: &[peakdomain_core::SystemKind],
) -> ConfigResult<Vec<peakdomain_core::SystemKind>> {
    let names = r.list("system", default);
    if names.is_empty() {
        return Err(crate::config::ConfigError("system: empty list".into()));
    }
    names
        .iter()
        .map(|n| {
            allowed
                .iter()
                .copied()
                .find(|k| k.name() == n.as_str())
                .ok_or_else(|| {
                    let names: Vec<&str> = allowed.iter().map(|k| k.name()).collect();
                    crate::config::ConfigError(format!(
                        "system: unsupported {n:?} here; expected one of {}",
                        names.join(", ")
                    ))
                })
        })
        .collect()
}
