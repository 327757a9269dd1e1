use thiserror::Error;

use super::ast::{BinOp, Expr, UnOp};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
}

#[derive(Debug, Clone)]
enum Node<S> {
    Const(S),
    Bool(bool),
    Slot(usize),
    Un(UnOp, Box<Node<S>>),
    Bin(BinOp, Box<Node<S>>, Box<Node<S>>),
}

/// An expression with variables resolved to slots of a flat environment
/// vector. Evaluation does not allocate.
#[derive(Debug, Clone)]
pub struct CompiledExpr<S> {
    root: Node<S>,
}

impl<S: Scalar> CompiledExpr<S> {
    pub fn compile(e: &Expr, resolve: &impl Fn(&str) -> Option<usize>) -> Result<Self, CompileError> {
        Ok(Self { root: lower(e, resolve)? })
    }

    pub fn eval(&self, env: &[S]) -> S {
        num(&self.root, env)
    }

    pub fn eval_bool(&self, env: &[S]) -> bool {
        truth(&self.root, env)
    }
}

fn lower<S: Scalar>(e: &Expr, resolve: &impl Fn(&str) -> Option<usize>) -> Result<Node<S>, CompileError> {
    Ok(match e {
        Expr::Num(v) => Node::Const(S::lit(*v)),
        Expr::Bool(b) => Node::Bool(*b),
        Expr::Var(v) => Node::Slot(resolve(v).ok_or_else(|| CompileError::UnknownVariable(v.clone()))?),
        Expr::Unary(op, a) => Node::Un(*op, Box::new(lower(a, resolve)?)),
        Expr::Binary(op, a, b) => Node::Bin(*op, Box::new(lower(a, resolve)?), Box::new(lower(b, resolve)?)),
    })
}

fn num<S: Scalar>(n: &Node<S>, env: &[S]) -> S {
    match n {
        Node::Const(c) => *c,
        Node::Slot(i) => env[*i],
        Node::Bool(_) | Node::Un(UnOp::Not, _) => bool_as_num(truth(n, env)),
        Node::Un(op, a) => {
            let x = num(a, env);
            match op {
                UnOp::Neg => -x,
                UnOp::Abs => x.abs(),
                UnOp::Sin => x.sin(),
                UnOp::Cos => x.cos(),
                UnOp::Sqrt => x.sqrt(),
                UnOp::Not => unreachable!(),
            }
        }
        Node::Bin(op, a, b) => match op {
            BinOp::Add => num(a, env) + num(b, env),
            BinOp::Sub => num(a, env) - num(b, env),
            BinOp::Mul => num(a, env) * num(b, env),
            BinOp::Div => num(a, env) / num(b, env),
            BinOp::Min => num(a, env).min(num(b, env)),
            BinOp::Max => num(a, env).max(num(b, env)),
            _ => bool_as_num(truth(n, env)),
        },
    }
}

fn bool_as_num<S: Scalar>(b: bool) -> S {
    if b {
        S::one()
    } else {
        S::zero()
    }
}

fn truth<S: Scalar>(n: &Node<S>, env: &[S]) -> bool {
    match n {
        Node::Bool(b) => *b,
        Node::Un(UnOp::Not, a) => !truth(a, env),
        Node::Bin(op, a, b) => match op {
            BinOp::And => truth(a, env) && truth(b, env),
            BinOp::Or => truth(a, env) || truth(b, env),
            BinOp::Lt => num(a, env) < num(b, env),
            BinOp::Le => num(a, env) <= num(b, env),
            BinOp::Gt => num(a, env) > num(b, env),
            BinOp::Ge => num(a, env) >= num(b, env),
            BinOp::Eq => num(a, env) == num(b, env),
            BinOp::Ne => num(a, env) != num(b, env),
            _ => num(n, env) != S::zero(),
        },
        _ => num(n, env) != S::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn eval_with(src: &str, names: &[&str], vals: &[f64]) -> f64 {
        let e = parse(src).unwrap();
        let c = CompiledExpr::<f64>::compile(&e, &|n| names.iter().position(|m| *m == n)).unwrap();
        c.eval(vals)
    }

    #[test]
    fn arithmetic_and_functions() {
        assert_eq!(eval_with("1 + 2 * 3", &[], &[]), 7.0);
        assert_eq!(eval_with("(1 + 2) * 3", &[], &[]), 9.0);
        assert_eq!(eval_with("abs(x - y)", &["x", "y"], &[1.0, 4.0]), 3.0);
        assert_eq!(eval_with("max(-5, min(3, x))", &["x"], &[10.0]), 3.0);
        assert_eq!(eval_with("8 / 2 / 2", &[], &[]), 2.0);
        assert_eq!(eval_with("2 - 3 - 4", &[], &[]), -5.0);
    }

    #[test]
    fn boolean_guards() {
        let e = parse("abs(ngps - nenc) > theta && clock > 0.5").unwrap();
        let names = ["ngps", "nenc", "theta", "clock"];
        let c = CompiledExpr::<f64>::compile(&e, &|n| names.iter().position(|m| *m == n)).unwrap();
        assert!(c.eval_bool(&[3.0, 0.0, 2.0, 1.0]));
        assert!(!c.eval_bool(&[3.0, 0.0, 2.0, 0.1]));
        assert!(!c.eval_bool(&[1.0, 0.0, 2.0, 1.0]));
    }

    #[test]
    fn unknown_variable_is_reported() {
        let e = parse("x + z").unwrap();
        let err = CompiledExpr::<f64>::compile(&e, &|n| (n == "x").then_some(0)).unwrap_err();
        assert_eq!(err, CompileError::UnknownVariable("z".into()));
    }

    #[test]
    fn single_precision_evaluation() {
        let e = parse("sin(x) * 2").unwrap();
        let c = CompiledExpr::<f32>::compile(&e, &|_| Some(0)).unwrap();
        assert!((c.eval(&[0.5f32]) - 2.0 * 0.5f32.sin()).abs() < 1e-6);
    }
}
