use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::types::{HybridModel, Init, VarKind};
use crate::expr::{Expr, Ty};

/// One problem found by [`validate`]. `path` points at the offending element
/// in the JSON structure, e.g. `transitions[id=3].guard`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "and" | "or" | "not" | "true" | "false")
}

/// Checks every structural rule of the model and returns all violations.
/// An empty result means the model is valid.
pub fn validate(m: &HybridModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |path: String, message: String| out.push(Diagnostic { path, message });

    let mut kinds: BTreeMap<&str, VarKind> = BTreeMap::new();
    for (i, v) in m.variables.iter().enumerate() {
        let path = format!("variables[{i}]");
        if !is_identifier(&v.name) {
            diag(path.clone(), format!("'{}' is not a valid identifier", v.name));
        }
        if kinds.insert(&v.name, v.kind).is_some() {
            diag(path.clone(), format!("duplicate variable '{}'", v.name));
        }
        match (v.kind, v.init) {
            (_, Init::Interval(lo, hi)) if lo > hi || !lo.is_finite() || !hi.is_finite() => {
                diag(path.clone(), format!("initial interval [{lo}, {hi}] of '{}' is empty or not finite", v.name))
            }
            (_, Init::Value(x)) if !x.is_finite() => {
                diag(path.clone(), format!("initial value of '{}' is not finite", v.name))
            }
            (VarKind::State, Init::Unset) => {
                diag(path.clone(), format!("state '{}' needs an initial value or interval", v.name))
            }
            (VarKind::Input, Init::Value(_) | Init::Interval(..)) => {
                diag(path.clone(), format!("input '{}' is bound by a signal and takes no initial value", v.name))
            }
            _ => {}
        }
        if let Some(base) = &v.init_relative_to {
            let ok = m.var(base).is_some_and(|b| b.kind == VarKind::State && b.init_relative_to.is_none());
            if !ok || v.kind != VarKind::State {
                diag(path, format!("'{}' can only be relative to a state with an absolute initial value", v.name));
            }
        }
    }

    let check = |e: &Expr, want: Ty, path: String, out: &mut Vec<Diagnostic>| {
        for name in e.vars() {
            if !kinds.contains_key(name) {
                out.push(Diagnostic { path: path.clone(), message: format!("undeclared variable '{name}'") });
            }
        }
        match e.ty() {
            Ok(t) if t != want => {
                out.push(Diagnostic { path, message: format!("expected a {want} expression, found a {t} one") })
            }
            Err(err) => out.push(Diagnostic { path, message: err.to_string() }),
            Ok(_) => {}
        }
    };

    let mut mode_ids = BTreeSet::new();
    for m2 in &m.modes {
        let path = format!("modes[id={}]", m2.id);
        if !mode_ids.insert(m2.id) {
            out.push(Diagnostic { path: path.clone(), message: "duplicate mode id".into() });
        }
        check(&m2.invariant, Ty::Bool, format!("{path}.invariant"), &mut out);
        for (name, e) in &m2.flow {
            match kinds.get(name.as_str()) {
                Some(k) if k.is_integrated() => {}
                Some(k) => out.push(Diagnostic {
                    path: format!("{path}.flow.{name}"),
                    message: format!("flow declared for {k} variable '{name}'"),
                }),
                None => out.push(Diagnostic {
                    path: format!("{path}.flow.{name}"),
                    message: format!("flow declared for undeclared variable '{name}'"),
                }),
            }
            check(e, Ty::Num, format!("{path}.flow.{name}"), &mut out);
        }
        for v in m.vars_of(VarKind::State) {
            if !m2.flow.contains_key(&v.name) {
                out.push(Diagnostic {
                    path: format!("{path}.flow"),
                    message: format!("missing flow for state '{}'", v.name),
                });
            }
        }
    }
    for m2 in &m.modes {
        if let Some(src) = m2.copy_of {
            if !mode_ids.contains(&src) {
                out.push(Diagnostic {
                    path: format!("modes[id={}].copy_of", m2.id),
                    message: format!("copy of unknown mode {src}"),
                });
            }
        }
    }
    if !mode_ids.contains(&m.initial_mode) {
        out.push(Diagnostic { path: "initial_mode".into(), message: format!("unknown mode {}", m.initial_mode) });
    }

    let mut trans_ids = BTreeSet::new();
    let mut priorities = BTreeSet::new();
    for t in &m.transitions {
        let path = format!("transitions[id={}]", t.id);
        if !trans_ids.insert(t.id) {
            out.push(Diagnostic { path: path.clone(), message: "duplicate transition id".into() });
        }
        for (end, id) in [("source", t.source), ("destination", t.destination)] {
            if !mode_ids.contains(&id) {
                out.push(Diagnostic { path: format!("{path}.{end}"), message: format!("unknown mode {id}") });
            }
        }
        if t.priority == 0 {
            out.push(Diagnostic { path: format!("{path}.priority"), message: "priorities start at 1".into() });
        }
        if !priorities.insert((t.source, t.priority)) {
            out.push(Diagnostic {
                path: format!("{path}.priority"),
                message: format!(
                    "priority {} is already used by another transition leaving mode {}",
                    t.priority, t.source
                ),
            });
        }
        check(&t.guard, Ty::Bool, format!("{path}.guard"), &mut out);
        for (name, e) in &t.reset {
            match kinds.get(name.as_str()) {
                Some(k) if k.is_integrated() => {}
                _ => out.push(Diagnostic {
                    path: format!("{path}.reset.{name}"),
                    message: format!("reset target '{name}' is not a state or local variable"),
                }),
            }
            check(e, Ty::Num, format!("{path}.reset.{name}"), &mut out);
        }
    }
    out
}
