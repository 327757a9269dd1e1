//! Fixed-step simulation of hybrid automata.
//!
//! Continuous evolution uses classic fourth-order Runge-Kutta with inputs
//! held constant over each step. When a guard of the current mode switches
//! from false to true inside a step, the crossing time is located by
//! bisection on the step length to within `event_tol`. Transitions are
//! urgent: at every sample instant the highest-priority enabled transition
//! fires, repeatedly, until none is enabled. Resets are evaluated on the
//! state before the jump.
//!
//! Each recorded sample shows the state after the jumps of its instant.

mod engine;
mod init;
mod signal;
mod trace;

pub use engine::{SimConfig, SimError, Simulator};
pub use init::{sample_init, InitBox, InitDim};
pub(crate) use signal::derive_seed;
pub use signal::{parse_signals, InputSignal, SignalKind};
pub use trace::Trace;

use std::collections::BTreeMap;

use crate::model::HybridModel;
use crate::Scalar;

/// Variable name to value.
pub type Assignment = BTreeMap<String, f64>;

/// Convenience wrapper: prepares a [`Simulator`] and runs it once.
pub fn simulate<S: Scalar>(
    model: &HybridModel,
    inputs: &[InputSignal],
    init: &Assignment,
    params: &Assignment,
    cfg: &SimConfig<S>,
) -> Result<Trace<S>, SimError> {
    Simulator::new(model)?.run(inputs, init, params, cfg)
}
