use thiserror::Error;

use super::types::{HybridModel, Init, Mode, ModeId, Transition, TransitionId, VarKind, Variable};
use super::validate::is_identifier;
use crate::expr::{BinOp, Expr, Ty};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("a variable named '{0}' already exists")]
    DuplicateName(String),
    #[error("'{0}' is not a valid identifier")]
    BadIdentifier(String),
    #[error("mode {0} does not exist")]
    UnknownMode(ModeId),
    #[error("transition {0} does not exist")]
    UnknownTransition(TransitionId),
    #[error("mode '{0}' has no copy")]
    NoCopy(String),
    #[error("mode '{0}' has {1} copies, so its copy is ambiguous")]
    Ambiguous(String, usize),
    #[error("undeclared variable '{0}'")]
    UndeclaredVariable(String),
    #[error("'{0}' is a {1} variable and cannot be assigned a flow or reset")]
    NotAssignable(String, VarKind),
    #[error("mode '{0}' already defines a flow for '{1}'")]
    DuplicateFlow(String, String),
    #[error("transition {0} already resets '{1}'")]
    DuplicateReset(TransitionId, String),
    #[error("expected a {expected} expression but '{text}' is {found}")]
    WrongType { text: String, expected: Ty, found: Ty },
    #[error("ill-typed expression '{0}': {1}")]
    IllTyped(String, String),
}

/// Which expressions a [`HybridModel::replace`] touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// The flow expressions of one mode.
    Flow(ModeId),
    /// The guard of one transition.
    Guard(TransitionId),
    /// Every flow, invariant, guard and reset right-hand side in the model.
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
}

impl Connective {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "&&" | "and" | "&" => Some(Connective::And),
            "||" | "or" | "|" => Some(Connective::Or),
            _ => None,
        }
    }
}

impl HybridModel {
    fn check_expr(&self, e: &Expr, want: Ty) -> Result<(), EditError> {
        if let Some(v) = e.vars().into_iter().find(|v| self.var(v).is_none()) {
            return Err(EditError::UndeclaredVariable(v.to_string()));
        }
        match e.ty() {
            Ok(t) if t == want => Ok(()),
            Ok(found) => Err(EditError::WrongType { text: e.to_string(), expected: want, found }),
            Err(err) => Err(EditError::IllTyped(e.to_string(), err.to_string())),
        }
    }

    fn add_variable(&mut self, name: &str, kind: VarKind, init: Init) -> Result<(), EditError> {
        if !is_identifier(name) {
            return Err(EditError::BadIdentifier(name.to_string()));
        }
        if self.var(name).is_some() {
            return Err(EditError::DuplicateName(name.to_string()));
        }
        self.variables.push(Variable::new(name, kind, init));
        Ok(())
    }

    /// Declares a new parameter. Its value is bound at simulation time.
    pub fn add_param(&mut self, name: &str) -> Result<(), EditError> {
        self.add_variable(name, VarKind::Param, Init::Unset)
    }

    /// Declares a new local variable starting at 0 with zero derivative in
    /// every mode until a flow is added.
    pub fn add_local_var(&mut self, name: &str) -> Result<(), EditError> {
        self.add_variable(name, VarKind::Local, Init::Value(0.0))
    }

    /// Copies mode `src` (flows and invariant, not transitions) under the
    /// name `<name>_copy<k>` with the smallest free `k >= 1`.
    pub fn add_mode(&mut self, src: ModeId) -> Result<ModeId, EditError> {
        let orig = self.mode(src).ok_or(EditError::UnknownMode(src))?.clone();
        let name = (1..)
            .map(|k| format!("{}_copy{k}", orig.name))
            .find(|n| self.mode_by_name(n).is_none())
            .expect("unbounded range");
        let id = self.next_mode_id();
        self.modes.push(Mode { id, name, invariant: orig.invariant, flow: orig.flow, copy_of: Some(src) });
        Ok(id)
    }

    /// The unique mode created by copying `m`.
    pub fn get_copy_mode(&self, m: ModeId) -> Result<ModeId, EditError> {
        let orig = self.mode(m).ok_or(EditError::UnknownMode(m))?;
        let copies: Vec<_> = self.modes.iter().filter(|c| c.copy_of == Some(m)).map(|c| c.id).collect();
        match copies.as_slice() {
            [one] => Ok(*one),
            [] => Err(EditError::NoCopy(orig.name.clone())),
            many => Err(EditError::Ambiguous(orig.name.clone(), many.len())),
        }
    }

    /// Adds a transition with an empty reset and the lowest priority among
    /// the transitions leaving `src`.
    pub fn add_transition(&mut self, src: ModeId, dst: ModeId, guard: Expr) -> Result<TransitionId, EditError> {
        for m in [src, dst] {
            self.mode(m).ok_or(EditError::UnknownMode(m))?;
        }
        self.check_expr(&guard, Ty::Bool)?;
        let priority = self.transitions.iter().filter(|t| t.source == src).map(|t| t.priority).max().unwrap_or(0) + 1;
        let id = self.next_transition_id();
        self.transitions.push(Transition {
            id,
            source: src,
            destination: dst,
            guard,
            reset: Default::default(),
            priority,
        });
        Ok(id)
    }

    /// Substitutes every occurrence of `old` by `new` inside `scope` and
    /// returns how many occurrences were replaced.
    pub fn replace(&mut self, scope: Scope, old: &str, new: &Expr) -> Result<usize, EditError> {
        if self.var(old).is_none() {
            return Err(EditError::UndeclaredVariable(old.to_string()));
        }
        self.check_expr(new, Ty::Num)?;
        let subst = |e: &mut Expr, count: &mut usize| {
            let (r, n) = e.substitute(old, new);
            *e = r;
            *count += n;
        };
        let mut count = 0;
        match scope {
            Scope::Flow(id) => {
                let mode = self.mode_mut(id).ok_or(EditError::UnknownMode(id))?;
                mode.flow.values_mut().for_each(|e| subst(e, &mut count));
            }
            Scope::Guard(id) => {
                let t = self.transition_mut(id).ok_or(EditError::UnknownTransition(id))?;
                subst(&mut t.guard, &mut count);
            }
            Scope::Model => {
                for m in &mut self.modes {
                    subst(&mut m.invariant, &mut count);
                    m.flow.values_mut().for_each(|e| subst(e, &mut count));
                }
                for t in &mut self.transitions {
                    subst(&mut t.guard, &mut count);
                    t.reset.values_mut().for_each(|e| subst(e, &mut count));
                }
            }
        }
        Ok(count)
    }

    fn assignable(&self, var: &str) -> Result<(), EditError> {
        match self.var(var) {
            None => Err(EditError::UndeclaredVariable(var.to_string())),
            Some(v) if !v.kind.is_integrated() => Err(EditError::NotAssignable(var.to_string(), v.kind)),
            Some(_) => Ok(()),
        }
    }

    /// Defines `d var / dt = e` in `mode`.
    pub fn add_flow(&mut self, mode: ModeId, var: &str, e: Expr) -> Result<(), EditError> {
        self.assignable(var)?;
        self.check_expr(&e, Ty::Num)?;
        let m = self.mode_mut(mode).ok_or(EditError::UnknownMode(mode))?;
        if m.flow.contains_key(var) {
            return Err(EditError::DuplicateFlow(m.name.clone(), var.to_string()));
        }
        m.flow.insert(var.to_string(), e);
        Ok(())
    }

    /// Combines the guard of `t` with `clause`: `guard := guard op clause`.
    pub fn add_guard_label(&mut self, t: TransitionId, op: Connective, clause: Expr) -> Result<(), EditError> {
        self.check_expr(&clause, Ty::Bool)?;
        let tr = self.transition_mut(t).ok_or(EditError::UnknownTransition(t))?;
        let op = match op {
            Connective::And => BinOp::And,
            Connective::Or => BinOp::Or,
        };
        tr.guard = Expr::bin(op, tr.guard.clone(), clause);
        Ok(())
    }

    /// Adds the assignment `var := e` to the reset of `t`.
    pub fn add_reset_label(&mut self, t: TransitionId, var: &str, e: Expr) -> Result<(), EditError> {
        self.assignable(var)?;
        self.check_expr(&e, Ty::Num)?;
        let tr = self.transition_mut(t).ok_or(EditError::UnknownTransition(t))?;
        if tr.reset.contains_key(var) {
            return Err(EditError::DuplicateReset(t, var.to_string()));
        }
        tr.reset.insert(var.to_string(), e);
        Ok(())
    }
}
