//! Falsification and parameter synthesis.
//!
//! [`falsify`] minimises robustness over a [`SearchSpace`] of parameters,
//! initial states and attack input values with CMA-ES. [`synthesize`] wraps
//! it in the repair loop: each counterexample cuts the unsafe part off the
//! range of the mined parameters (their monotonicity is declared by the
//! user), the remaining range is bisected with fixed-parameter
//! falsification probes, and the result is checked on random runs.
//!
//! All randomness derives from the problem seed, and parallel evaluations
//! are merged in candidate order, so results do not depend on the number
//! of workers.

mod cmaes;
mod falsify;
mod space;
mod synthesize;

pub use falsify::{falsify, FalsificationResult, FalsifyBudget, Witness};
pub use space::{Dim, DimKind, Point, SearchSpace};
pub use synthesize::{
    synthesize, validate, validation_seed, MinedParam, Monotonicity, Probe, Round, Status, SynthBudget, SynthProblem,
    SynthResult, Validation,
};

use thiserror::Error;

use crate::model::HybridModel;
use crate::sim::{Assignment, InputSignal, SimConfig, SimError};
use crate::stl::{Formula, StlError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stl(#[from] StlError),
    #[error("'{0}' is not a parameter of the model")]
    UnknownParam(String),
    #[error("parameter '{0}' has no value and is not searched")]
    UnboundParam(String),
    #[error("range of '{name}' is empty: [{lo}, {hi}]")]
    BadRange { name: String, lo: f64, hi: f64 },
    #[error("bad budget: {0}")]
    BadBudget(String),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// The fixed part of a falsification problem: what is simulated, for how
/// long, and what it must satisfy.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: HybridModel,
    pub spec: Formula,
    pub signals: Vec<InputSignal>,
    /// Parameter values that override the model's.
    pub params: Assignment,
    pub horizon: f64,
    pub step: f64,
}

impl Scenario {
    pub fn new(model: HybridModel, spec: Formula, signals: Vec<InputSignal>, horizon: f64, step: f64) -> Self {
        Self { model, spec, signals, params: Assignment::new(), horizon, step }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub(crate) fn config(&self, seed: u64) -> SimConfig<f64> {
        SimConfig { seed, ..SimConfig::with_horizon(self.horizon).step(self.step) }
    }
}
