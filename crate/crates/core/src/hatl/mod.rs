//! HATL, a small scripting language for hybrid automaton transformations.
//!
//! A script sees the model under transformation as `model` and edits it
//! through method calls (`model.addParam("theta")`, `t.addGuardLabel(...)`).
//! `formode` and `fortran` loops iterate over a snapshot of the mode or
//! transition ids taken when the loop starts, in ascending id order, so
//! modes added inside the loop body are not revisited.
//!
//! Interpretation is all-or-nothing: [`interpret`] works on a private copy and
//! hands back a new model only when every statement succeeded and the result
//! passes validation.

mod ast;
mod builtins;
mod interp;
mod lexer;
mod parser;

pub use ast::{Arg, Call, Ref, Script, Span, Stmt, Value as Rhs};
pub use builtins::{ArgKind, Builtin, BuiltinTable, RecvKind};
pub use interp::{interpret, interpret_with, ModelRef, Value};
pub use parser::parse_script;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HatlErrorKind {
    Syntax,
    Runtime,
    InvalidResult,
}

/// Any failure while parsing or running a script. The input model is never
/// modified when this is returned.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct HatlError {
    pub kind: HatlErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl HatlError {
    pub(crate) fn new(kind: HatlErrorKind, span: Span, message: impl Into<String>) -> Self {
        Self { kind, line: span.line, column: span.column, message: message.into() }
    }
}

/// Parses and runs `src` against `model`.
pub fn run(model: &crate::model::HybridModel, src: &str) -> Result<crate::model::HybridModel, HatlError> {
    interpret(model, &parse_script(src)?)
}
