use std::collections::BTreeMap;

use super::interp::{Ctx, ModelRef, Value};
use crate::expr::{self, Expr};
use crate::model::{Connective, EditError, ModeId, Scope};

/// What a method may be called on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecvKind {
    Model,
    Mode,
    Transition,
    /// Model, mode or transition. Used by `replace`, whose scope comes from
    /// its first argument rather than from the receiver.
    Any,
}

/// Expected argument kinds, used for arity and kind checks before dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    Str,
    Mode,
    /// A string holding an expression, a number, or a guard read from a
    /// transition (`t.guard`).
    Expr,
    /// `m.flow`, `t.guard` or a model.
    Scope,
}

impl ArgKind {
    fn describe(self) -> &'static str {
        match self {
            ArgKind::Str => "string",
            ArgKind::Mode => "mode",
            ArgKind::Expr => "expression",
            ArgKind::Scope => "scope (m.flow, t.guard or a model)",
        }
    }
}

pub type BuiltinFn = fn(&mut Ctx, &Value, &[Value]) -> Result<Value, String>;

#[derive(Clone)]
pub struct Builtin {
    pub receiver: RecvKind,
    pub params: &'static [ArgKind],
    /// Mutating methods refuse receivers that belong to a `copyModel` snapshot.
    pub mutates: bool,
    pub func: BuiltinFn,
}

impl Builtin {
    /// Human readable signature used in error messages.
    pub fn signature(&self, name: &str) -> String {
        let params: Vec<_> = self.params.iter().map(|p| p.describe()).collect();
        format!("{name}({})", params.join(", "))
    }
}

/// Registry of the methods a script can call. The interpreter consults it
/// for every call, so new edit operations can be added with [`Self::register`].
#[derive(Clone)]
pub struct BuiltinTable {
    entries: BTreeMap<String, Builtin>,
}

impl BuiltinTable {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &str, b: Builtin) {
        self.entries.insert(name.to_string(), b);
    }

    pub fn get(&self, name: &str) -> Option<&Builtin> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

impl Default for BuiltinTable {
    fn default() -> Self {
        use ArgKind as A;
        use RecvKind as R;
        let mut t = Self::empty();
        let mut add =
            |name, receiver, params, mutates, func| t.register(name, Builtin { receiver, params, mutates, func });
        add("copyModel", R::Model, &[], false, copy_model as BuiltinFn);
        add("addParam", R::Model, &[A::Str], true, add_param);
        add("addLocalVar", R::Model, &[A::Str], true, add_local_var);
        add("addMode", R::Model, &[A::Mode], true, add_mode);
        add("getCopyMode", R::Model, &[A::Mode], false, get_copy_mode);
        add("addTransition", R::Model, &[A::Mode, A::Mode, A::Expr], true, add_transition);
        add("replace", R::Any, &[A::Scope, A::Str, A::Expr], true, replace);
        add("addFlow", R::Mode, &[A::Str], true, add_flow);
        add("addGuardLabel", R::Transition, &[A::Str, A::Expr], true, add_guard_label);
        add("addResetLabel", R::Transition, &[A::Str], true, add_reset_label);
        t
    }
}

fn edit(e: EditError) -> String {
    e.to_string()
}

fn parse_expr(src: &str) -> Result<Expr, String> {
    expr::parse(src).map_err(|e| format!("cannot parse expression \"{src}\": {}", e.message))
}

fn to_expr(ctx: &Ctx, v: &Value) -> Result<Expr, String> {
    match v {
        Value::Str(s) => parse_expr(s),
        Value::Num(x) => Ok(Expr::Num(*x)),
        Value::Guard(mr, id) => Ok(ctx.model(*mr).transition(*id).ok_or("dangling transition handle")?.guard.clone()),
        _ => unreachable!("argument kinds are checked before dispatch"),
    }
}

fn text(v: &Value) -> &str {
    match v {
        Value::Str(s) => s,
        _ => unreachable!("argument kinds are checked before dispatch"),
    }
}

/// Resolves a mode handle to an id of model `mr`. Handles are plain ids, so a
/// mode read from a snapshot names the same mode in the working model.
fn mode_in(ctx: &Ctx, mr: ModelRef, v: &Value) -> Result<ModeId, String> {
    let Value::Mode(_, id) = v else { unreachable!("argument kinds are checked before dispatch") };
    ctx.model(mr).mode(*id).map(|m| m.id).ok_or_else(|| format!("mode {id} does not exist in this model"))
}

fn mode_id(ctx: &Ctx, v: &Value) -> Result<ModeId, String> {
    mode_in(ctx, ModelRef::Working, v)
}

fn copy_model(ctx: &mut Ctx, recv: &Value, _: &[Value]) -> Result<Value, String> {
    let Value::Model(mr) = recv else { unreachable!() };
    let snapshot = ctx.model(*mr).clone();
    ctx.snapshots.push(snapshot);
    Ok(Value::Model(ModelRef::Snapshot(ctx.snapshots.len() - 1)))
}

fn add_param(ctx: &mut Ctx, _: &Value, args: &[Value]) -> Result<Value, String> {
    ctx.working_mut().add_param(text(&args[0])).map_err(edit)?;
    Ok(Value::Unit)
}

fn add_local_var(ctx: &mut Ctx, _: &Value, args: &[Value]) -> Result<Value, String> {
    ctx.working_mut().add_local_var(text(&args[0])).map_err(edit)?;
    Ok(Value::Unit)
}

fn add_mode(ctx: &mut Ctx, _: &Value, args: &[Value]) -> Result<Value, String> {
    let src = mode_id(ctx, &args[0])?;
    let id = ctx.working_mut().add_mode(src).map_err(edit)?;
    Ok(Value::Mode(ModelRef::Working, id))
}

fn get_copy_mode(ctx: &mut Ctx, recv: &Value, args: &[Value]) -> Result<Value, String> {
    let Value::Model(mr) = recv else { unreachable!() };
    let src = mode_in(ctx, *mr, &args[0])?;
    let id = ctx.model(*mr).get_copy_mode(src).map_err(edit)?;
    Ok(Value::Mode(*mr, id))
}

fn add_transition(ctx: &mut Ctx, _: &Value, args: &[Value]) -> Result<Value, String> {
    let src = mode_id(ctx, &args[0])?;
    let dst = mode_id(ctx, &args[1])?;
    let guard = to_expr(ctx, &args[2])?;
    let id = ctx.working_mut().add_transition(src, dst, guard).map_err(edit)?;
    Ok(Value::Transition(ModelRef::Working, id))
}

fn replace(ctx: &mut Ctx, _: &Value, args: &[Value]) -> Result<Value, String> {
    let scope = match &args[0] {
        Value::Flow(ModelRef::Working, id) => Scope::Flow(*id),
        Value::Guard(ModelRef::Working, id) => Scope::Guard(*id),
        Value::Model(ModelRef::Working) => Scope::Model,
        _ => return Err("replace can only edit the model being transformed, not a copy".into()),
    };
    let new = to_expr(ctx, &args[2])?;
    let n = ctx.working_mut().replace(scope, text(&args[1]), &new).map_err(edit)?;
    Ok(Value::Num(n as f64))
}

fn split_assignment(src: &str) -> Result<(String, Expr), String> {
    expr::parse_assignment(src).map_err(|e| format!("cannot parse \"{src}\": {}", e.message))
}

fn add_flow(ctx: &mut Ctx, recv: &Value, args: &[Value]) -> Result<Value, String> {
    let Value::Mode(_, id) = recv else { unreachable!() };
    let (lhs, e) = split_assignment(text(&args[0]))?;
    let m = ctx.working();
    // `x_dot = ...` names the derivative of `x`.
    let var = match lhs.strip_suffix("_dot") {
        Some(base) if m.var(&lhs).is_none() && m.var(base).is_some() => base.to_string(),
        _ => lhs,
    };
    ctx.working_mut().add_flow(*id, &var, e).map_err(edit)?;
    Ok(Value::Unit)
}

fn add_guard_label(ctx: &mut Ctx, recv: &Value, args: &[Value]) -> Result<Value, String> {
    let Value::Transition(_, id) = recv else { unreachable!() };
    let op = Connective::parse(text(&args[0]))
        .ok_or_else(|| format!("unknown connective \"{}\"; use \"&&\" or \"||\"", text(&args[0])))?;
    let clause = to_expr(ctx, &args[1])?;
    ctx.working_mut().add_guard_label(*id, op, clause).map_err(edit)?;
    Ok(Value::Unit)
}

fn add_reset_label(ctx: &mut Ctx, recv: &Value, args: &[Value]) -> Result<Value, String> {
    let Value::Transition(_, id) = recv else { unreachable!() };
    let (var, e) = split_assignment(text(&args[0]))?;
    ctx.working_mut().add_reset_label(*id, &var, e).map_err(edit)?;
    Ok(Value::Unit)
}
