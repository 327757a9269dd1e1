//! Repair of hybrid automata against signal temporal logic requirements.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`] parses, prints and evaluates the arithmetic/boolean expressions
//!   used in flows, guards, resets and invariants.
//! * [`model`] holds the hybrid automaton data model, its JSON format, the
//!   validator and the primitive edit operations.
//! * [`hatl`] is the transformation language interpreter built on those edits.
//! * [`sim`] is a fixed-step RK4 simulator with guard-crossing localisation.
//! * [`stl`] parses STL formulas and computes quantitative robustness.
//! * [`synth`] contains the CMA-ES falsifier and the parameter synthesis loop.
//! * [`cases`] ships the adaptive cruise control and power grid case studies.
//!
//! Expression evaluation, simulation, traces and robustness are generic over
//! the [`Scalar`] type. The aliases below fix it to `f64`, which is what the
//! synthesis layer uses.

pub mod cases;
pub mod expr;
pub mod hatl;
pub mod model;
mod scalar;
pub mod sim;
pub mod stl;
pub mod synth;

pub use scalar::Scalar;

/// Simulation trace with `f64` samples.
pub type Trace = sim::Trace<f64>;
/// Simulation trace with `f32` samples.
pub type TraceF32 = sim::Trace<f32>;
/// Simulator in double precision.
pub type Simulator = sim::Simulator<f64>;
/// Simulator in single precision.
pub type SimulatorF32 = sim::Simulator<f32>;
pub type SimConfig = sim::SimConfig<f64>;
pub type Robustness = stl::Robustness<f64>;
