use std::collections::BTreeMap;
use std::fmt;

use super::ast::{self, Arg, Call, Ref, Script, Span, Stmt};
use super::builtins::{ArgKind, BuiltinTable, RecvKind};
use super::{HatlError, HatlErrorKind};
use crate::model::{validate, HybridModel, ModeId, TransitionId};

/// Which model a handle points into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelRef {
    /// The model being transformed.
    Working,
    /// A read-only copy made by `copyModel`.
    Snapshot(usize),
}

/// Runtime values bound to script names.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Model(ModelRef),
    Mode(ModelRef, ModeId),
    Transition(ModelRef, TransitionId),
    Modes(ModelRef),
    Transitions(ModelRef),
    Flow(ModelRef, ModeId),
    Guard(ModelRef, TransitionId),
    Str(String),
    Num(f64),
    Unit,
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Model(_) => "model",
            Value::Mode(..) => "mode",
            Value::Transition(..) => "transition",
            Value::Modes(_) => "mode collection",
            Value::Transitions(_) => "transition collection",
            Value::Flow(..) => "flow",
            Value::Guard(..) => "guard",
            Value::Str(_) => "string",
            Value::Num(_) => "number",
            Value::Unit => "nothing",
        }
    }

    fn model_ref(&self) -> Option<ModelRef> {
        match self {
            Value::Model(m) | Value::Modes(m) | Value::Transitions(m) => Some(*m),
            Value::Mode(m, _) | Value::Transition(m, _) | Value::Flow(m, _) | Value::Guard(m, _) => Some(*m),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Mode(_, id) => write!(f, "mode {id}"),
            Value::Transition(_, id) => write!(f, "transition {id}"),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::Num(v) => write!(f, "{v}"),
            other => f.write_str(other.kind()),
        }
    }
}

/// Interpreter state visible to builtins.
pub struct Ctx {
    working: HybridModel,
    pub(crate) snapshots: Vec<HybridModel>,
    globals: BTreeMap<String, Value>,
    /// Loop variables, innermost last.
    locals: Vec<(String, Value)>,
}

impl Ctx {
    pub fn model(&self, r: ModelRef) -> &HybridModel {
        match r {
            ModelRef::Working => &self.working,
            ModelRef::Snapshot(i) => &self.snapshots[i],
        }
    }

    pub fn working(&self) -> &HybridModel {
        &self.working
    }

    pub fn working_mut(&mut self) -> &mut HybridModel {
        &mut self.working
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        self.locals.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v).or_else(|| self.globals.get(name))
    }

    fn field(&self, v: &Value, name: &str) -> Option<Value> {
        let mr = v.model_ref()?;
        let m = self.model(mr);
        Some(match (v, name) {
            (Value::Model(_), "Mode") => Value::Modes(mr),
            (Value::Model(_), "Trans") => Value::Transitions(mr),
            (Value::Mode(_, id), "flow") => Value::Flow(mr, *id),
            (Value::Mode(_, id), "name") => Value::Str(m.mode(*id)?.name.clone()),
            (Value::Transition(_, id), "source") => Value::Mode(mr, m.transition(*id)?.source),
            (Value::Transition(_, id), "destination") => Value::Mode(mr, m.transition(*id)?.destination),
            (Value::Transition(_, id), "guard") => Value::Guard(mr, *id),
            _ => return None,
        })
    }
}

fn runtime(span: Span, msg: impl Into<String>) -> HatlError {
    HatlError::new(HatlErrorKind::Runtime, span, msg)
}

struct Interp<'a> {
    ctx: Ctx,
    builtins: &'a BuiltinTable,
}

impl Interp<'_> {
    fn eval_ref(&self, r: &Ref) -> Result<Value, HatlError> {
        let mut v = self
            .ctx
            .lookup(&r.path[0])
            .cloned()
            .ok_or_else(|| runtime(r.span, format!("unknown name '{}'", r.path[0])))?;
        for seg in &r.path[1..] {
            v = self
                .ctx
                .field(&v, seg)
                .ok_or_else(|| runtime(r.span, format!("a {} has no field '{seg}' (in '{r}')", v.kind())))?;
        }
        Ok(v)
    }

    fn eval_arg(&self, a: &Arg) -> Result<Value, HatlError> {
        match a {
            Arg::Str(s) => Ok(Value::Str(s.clone())),
            Arg::Num(x) => Ok(Value::Num(*x)),
            Arg::Ref(r) => self.eval_ref(r),
        }
    }

    fn call(&mut self, c: &Call) -> Result<Value, HatlError> {
        let recv = self.eval_ref(&c.receiver)?;
        let Some(b) = self.builtins.get(&c.method) else {
            return Err(runtime(c.span, format!("unknown method '{}' on {} '{}'", c.method, recv.kind(), c.receiver)));
        };
        let sig = b.signature(&c.method);
        let recv_ok = match b.receiver {
            RecvKind::Model => matches!(recv, Value::Model(_)),
            RecvKind::Mode => matches!(recv, Value::Mode(..)),
            RecvKind::Transition => matches!(recv, Value::Transition(..)),
            RecvKind::Any => matches!(recv, Value::Model(_) | Value::Mode(..) | Value::Transition(..)),
        };
        if !recv_ok {
            return Err(runtime(c.span, format!("{sig} cannot be called on {} '{}'", recv.kind(), c.receiver)));
        }
        if b.mutates && matches!(recv.model_ref(), Some(ModelRef::Snapshot(_))) {
            return Err(runtime(
                c.span,
                format!(
                    "'{}' belongs to a copy made by copyModel, which is read-only; {sig} edits only 'model'",
                    c.receiver
                ),
            ));
        }
        if c.args.len() != b.params.len() {
            return Err(runtime(c.span, format!("{sig} expects {} argument(s), got {}", b.params.len(), c.args.len())));
        }
        let mut args = Vec::with_capacity(c.args.len());
        for (i, (a, want)) in c.args.iter().zip(b.params).enumerate() {
            let v = self.eval_arg(a)?;
            let ok = match want {
                ArgKind::Str => matches!(v, Value::Str(_)),
                ArgKind::Mode => matches!(v, Value::Mode(..)),
                ArgKind::Expr => matches!(v, Value::Str(_) | Value::Num(_) | Value::Guard(..)),
                ArgKind::Scope => matches!(v, Value::Flow(..) | Value::Guard(..) | Value::Model(_)),
            };
            if !ok {
                return Err(runtime(
                    c.span,
                    format!("argument {} of {sig} must be a {:?}, got {} ({a})", i + 1, want, v.kind()),
                ));
            }
            args.push(v);
        }
        (b.func)(&mut self.ctx, &recv, &args).map_err(|msg| runtime(c.span, format!("{}: {msg}", c.method)))
    }

    fn assign(&mut self, name: &str, v: Value, span: Span) -> Result<(), HatlError> {
        if name == "model" {
            return Err(runtime(span, "'model' cannot be reassigned"));
        }
        if let Some(slot) = self.ctx.locals.iter_mut().rev().find(|(n, _)| n == name) {
            slot.1 = v;
        } else {
            self.ctx.globals.insert(name.to_string(), v);
        }
        Ok(())
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<(), HatlError> {
        for s in stmts {
            match s {
                Stmt::Assign { name, value, span } => {
                    let v = match value {
                        ast::Value::Ref(r) => self.eval_ref(r)?,
                        ast::Value::Call(c) => self.call(c)?,
                    };
                    if v == Value::Unit {
                        return Err(runtime(*span, format!("the call assigned to '{name}' returns nothing")));
                    }
                    self.assign(name, v, *span)?;
                }
                Stmt::Call(c) => {
                    self.call(c)?;
                }
                Stmt::ForMode { var, collection, body, span } => {
                    let Value::Modes(mr) = self.eval_ref(collection)? else {
                        return Err(runtime(
                            *span,
                            format!("formode needs a mode collection such as model.Mode, got '{collection}'"),
                        ));
                    };
                    let items: Vec<_> =
                        self.ctx.model(mr).mode_ids().into_iter().map(|id| Value::Mode(mr, id)).collect();
                    self.each(var, items, body)?;
                }
                Stmt::ForTrans { var, collection, body, span } => {
                    let Value::Transitions(mr) = self.eval_ref(collection)? else {
                        return Err(runtime(
                            *span,
                            format!("fortran needs a transition collection such as model.Trans, got '{collection}'"),
                        ));
                    };
                    let items: Vec<_> =
                        self.ctx.model(mr).transition_ids().into_iter().map(|id| Value::Transition(mr, id)).collect();
                    self.each(var, items, body)?;
                }
            }
        }
        Ok(())
    }

    fn each(&mut self, var: &str, items: Vec<Value>, body: &[Stmt]) -> Result<(), HatlError> {
        for item in items {
            self.ctx.locals.push((var.to_string(), item));
            let r = self.block(body);
            self.ctx.locals.pop();
            r?;
        }
        Ok(())
    }
}

/// Runs `script` on a copy of `model` with the default builtins.
pub fn interpret(model: &HybridModel, script: &Script) -> Result<HybridModel, HatlError> {
    interpret_with(model, script, &BuiltinTable::default())
}

/// Runs `script` with a custom builtin table.
pub fn interpret_with(model: &HybridModel, script: &Script, builtins: &BuiltinTable) -> Result<HybridModel, HatlError> {
    let mut globals = BTreeMap::new();
    globals.insert("model".to_string(), Value::Model(ModelRef::Working));
    let mut it =
        Interp { ctx: Ctx { working: model.clone(), snapshots: Vec::new(), globals, locals: Vec::new() }, builtins };
    it.block(&script.stmts)?;
    let out = it.ctx.working;
    if let Some(d) = validate(&out).into_iter().next() {
        return Err(HatlError::new(
            HatlErrorKind::InvalidResult,
            Span::default(),
            format!("the transformed model is invalid: {d}"),
        ));
    }
    Ok(out)
}
