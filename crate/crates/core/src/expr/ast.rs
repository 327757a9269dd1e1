use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    Abs,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Min => "min",
            BinOp::Max => "max",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

/// Expression tree. Variables are referenced by name and resolved when the
/// expression is compiled against a model.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Bool(bool),
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Num,
    Bool,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Num => "numeric",
            Ty::Bool => "boolean",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expected a {expected} operand for '{op}' but found a {found} one")]
pub struct TypeError {
    pub op: String,
    pub expected: Ty,
    pub found: Ty,
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn un(op: UnOp, a: Expr) -> Expr {
        Expr::Unary(op, Box::new(a))
    }

    /// Infers the type of the expression, rejecting ill-typed trees.
    pub fn ty(&self) -> Result<Ty, TypeError> {
        fn expect(e: &Expr, want: Ty, op: &str) -> Result<(), TypeError> {
            let found = e.ty()?;
            if found == want {
                Ok(())
            } else {
                Err(TypeError { op: op.to_string(), expected: want, found })
            }
        }
        match self {
            Expr::Num(_) | Expr::Var(_) => Ok(Ty::Num),
            Expr::Bool(_) => Ok(Ty::Bool),
            Expr::Unary(UnOp::Not, a) => expect(a, Ty::Bool, "!").map(|_| Ty::Bool),
            Expr::Unary(op, a) => expect(a, Ty::Num, &format!("{op:?}").to_lowercase()).map(|_| Ty::Num),
            Expr::Binary(op, a, b) => {
                let operand = if op.is_logical() { Ty::Bool } else { Ty::Num };
                expect(a, operand, op.symbol())?;
                expect(b, operand, op.symbol())?;
                Ok(if op.is_logical() || op.is_comparison() { Ty::Bool } else { Ty::Num })
            }
        }
    }

    /// Names of all variables referenced by the expression.
    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Unary(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Num(_) | Expr::Bool(_) => {}
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => v == name,
            Expr::Unary(_, a) => a.mentions(name),
            Expr::Binary(_, a, b) => a.mentions(name) || b.mentions(name),
            Expr::Num(_) | Expr::Bool(_) => false,
        }
    }

    /// Replaces every occurrence of variable `name` by `with`, returning the
    /// new tree and the number of occurrences replaced.
    pub fn substitute(&self, name: &str, with: &Expr) -> (Expr, usize) {
        match self {
            Expr::Var(v) if v == name => (with.clone(), 1),
            Expr::Unary(op, a) => {
                let (a, n) = a.substitute(name, with);
                (Expr::un(*op, a), n)
            }
            Expr::Binary(op, a, b) => {
                let (a, n) = a.substitute(name, with);
                let (b, m) = b.substitute(name, with);
                (Expr::bin(*op, a, b), n + m)
            }
            other => (other.clone(), 0),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(v) => f.write_str(v),
            // A minus sign directly in front of a literal is read back as a
            // negative literal, so a negated literal keeps its own parentheses.
            Expr::Unary(UnOp::Neg, a) if matches!(**a, Expr::Num(_)) => write!(f, "(-({a}))"),
            Expr::Unary(UnOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(UnOp::Not, a) => write!(f, "(!{a})"),
            Expr::Unary(op, a) => {
                let name = match op {
                    UnOp::Abs => "abs",
                    UnOp::Sin => "sin",
                    UnOp::Cos => "cos",
                    _ => "sqrt",
                };
                write!(f, "{name}({a})")
            }
            Expr::Binary(op @ (BinOp::Min | BinOp::Max), a, b) => {
                write!(f, "{}({a}, {b})", op.symbol())
            }
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}
