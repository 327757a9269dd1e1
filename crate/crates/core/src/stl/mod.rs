//! Signal temporal logic over simulation traces.
//!
//! Formulas combine comparison atoms with `not`, `and`, `or`, `=>` and the
//! bounded temporal operators `G[a,b]` and `F[a,b]`; `b` may be `inf`.
//! Robustness follows the usual quantitative semantics: an atom `lhs > rhs`
//! has margin `lhs - rhs`, `G` takes a minimum and `F` a maximum over its
//! window. Between samples, signals are linearly interpolated, so window
//! endpoints that fall between samples are included at their interpolated
//! value. A robustness of zero or below is a violation.
//!
//! An unbounded `G[a,inf] phi` ranges over every time at which `phi` can
//! still be evaluated inside the trace.

mod ast;
mod parser;
mod robustness;

pub use ast::Formula;
pub use parser::{parse, parse_with_constants};
pub use robustness::{robustness, robustness_signal, Robustness, Verdict};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StlError {
    #[error("syntax error at {0}")]
    Syntax(#[from] crate::expr::ParseError),
    #[error("formula needs {required} s of trace but only {available} s are available")]
    HorizonTooShort { required: f64, available: f64 },
    #[error("atom refers to '{0}', which is not a trace column")]
    UnknownSignal(String),
    #[error("trace is empty")]
    EmptyTrace,
}
