//! Expressions over model variables.
//!
//! One grammar serves flows, guards, resets, invariants and STL atoms.
//! Precedence from loosest to tightest is `||`, `&&`, comparisons, `+ -`,
//! `* /`, then unary `- !`. The functions `abs`, `min`, `max`, `sin`, `cos`
//! and `sqrt` are built in. [`Expr`]'s `Display` output is fully
//! parenthesised and parses back to a structurally equal tree.

mod ast;
mod compile;
mod lexer;
mod parser;

pub use ast::{BinOp, Expr, Ty, TypeError, UnOp};
pub use compile::{CompileError, CompiledExpr};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse, parse_assignment, ExprParser, ParseError};
