//! Hybrid automaton data model.
//!
//! A [`HybridModel`] holds typed variables, modes with flows and invariants,
//! and prioritised transitions with guards and resets. The JSON format is
//! handled in [`HybridModel::from_json`] and [`HybridModel::to_json`],
//! structural checks live in [`validate`], and the primitive edits used by
//! the transformation language are methods on the model.

mod edit;
mod format;
mod types;
mod validate;

pub use edit::{Connective, EditError, Scope};
pub use format::FormatError;
pub use types::{HybridModel, Init, Mode, ModeId, Transition, TransitionId, VarKind, Variable};
pub use validate::{validate, Diagnostic};
