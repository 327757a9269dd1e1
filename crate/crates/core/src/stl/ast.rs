use std::fmt;

use crate::expr::{BinOp, Expr, UnOp};

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    /// A comparison between two numeric terms.
    Atom(Expr),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Globally(f64, f64, Box<Formula>),
    Eventually(f64, f64, Box<Formula>),
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl Formula {
    /// Builds an atom from a comparison such as `d > 5 + v`.
    pub fn atom(cmp: &Expr) -> Option<Formula> {
        margin(cmp).map(|_| Formula::Atom(cmp.clone()))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn globally(a: f64, b: f64, f: Formula) -> Formula {
        Formula::Globally(a, b, Box::new(f))
    }

    pub fn eventually(a: f64, b: f64, f: Formula) -> Formula {
        Formula::Eventually(a, b, Box::new(f))
    }

    /// Trace length needed to evaluate the formula at time 0. An unbounded
    /// window only needs its lower bound to lie inside the trace.
    pub fn horizon(&self) -> f64 {
        match self {
            Formula::Atom(_) => 0.0,
            Formula::Not(f) => f.horizon(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.horizon().max(b.horizon()),
            Formula::Globally(a, b, f) | Formula::Eventually(a, b, f) => {
                (if b.is_finite() { *b } else { *a }) + f.horizon()
            }
        }
    }

    /// Nesting depth of operators above the atoms.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Globally(_, _, f) | Formula::Eventually(_, _, f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

fn bound(b: f64) -> String {
    if b.is_finite() {
        b.to_string()
    } else {
        "inf".into()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(e) => write!(f, "{e}"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(a, b) => write!(f, "({a} and {b})"),
            Formula::Or(a, b) => write!(f, "({a} or {b})"),
            Formula::Implies(a, b) => write!(f, "({a} => {b})"),
            Formula::Globally(a, b, g) => write!(f, "(G[{}, {}] {g})", bound(*a), bound(*b)),
            Formula::Eventually(a, b, g) => write!(f, "(F[{}, {}] {g})", bound(*a), bound(*b)),
        }
    }
}

/// Margin of a comparison: positive exactly when it holds, and its size is
/// the distance to the boundary.
pub(crate) fn margin(cmp: &Expr) -> Option<Expr> {
    let Expr::Binary(op, l, r) = cmp else {
        return None;
    };
    let (l, r) = ((**l).clone(), (**r).clone());
    if l.ty().ok()? != crate::expr::Ty::Num || r.ty().ok()? != crate::expr::Ty::Num {
        return None;
    }
    let diff = |a, b| Expr::bin(BinOp::Sub, a, b);
    Some(match op {
        BinOp::Gt | BinOp::Ge => diff(l, r),
        BinOp::Lt | BinOp::Le => diff(r, l),
        BinOp::Eq => Expr::un(UnOp::Neg, Expr::un(UnOp::Abs, diff(l, r))),
        BinOp::Ne => Expr::un(UnOp::Abs, diff(l, r)),
        _ => return None,
    })
}
